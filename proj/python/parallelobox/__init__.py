"""Axis-aligned decomposition of meshes for parallel 3D printing."""

from ._parallelobox import (
    ConfigError,
    DegenerateBox,
    Decomposition,
    EmptyMesh,
    Error,
    InsufficientBoundaryCells,
    NoValidDecomposition,
    NonWatertightInput,
    ObjectiveParams,
    ParseError,
    Part,
    RunPlan,
    TimeCalibration,
    TriangleMesh,
    aggregate_time,
    clip_to_box,
    estimate_time,
    find_best_symmetry_plane,
    is_watertight,
    load_mesh,
    measure,
    parallel_time,
    parse_config,
    print_score,
    recursive_symmetry_baseline,
    run_metaheuristic,
    run_pipeline_once,
    write_stl,
)


def decompose(mesh, printers, *, sample_tries=3, granularity="very_fine", seed=0, **objective):
    """Run the metaheuristic with keyword settings; returns (decomposition, log)."""
    plan = RunPlan()
    plan.printers_available = printers
    plan.sample_tries = sample_tries
    plan.granularity = granularity
    plan.rng_seed = seed
    params = plan.objective
    for key, value in objective.items():
        if not hasattr(params, key):
            raise TypeError(f"unknown objective setting {key!r}")
        setattr(params, key, value)
    plan.objective = params
    return run_metaheuristic(mesh, plan)


__all__ = [name for name in dir() if not name.startswith("_")]
