#include "parallelobox/meta.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "parallelobox/errors.hpp"
#include "parallelobox/resolve.hpp"

namespace parallelobox {

double estimate_time(double volume, double surface_area, const ObjectiveParams& params, const TimeCalibration& cal) {
  const double bead = cal.line_width * cal.layer_height;
  return params.infill_fraction * volume / (bead * params.speed_infill) +
         cal.line_width * surface_area / (bead * params.speed_shell);
}

double parallel_time(const std::vector<double>& part_times) {
  double m = 0.0;
  for (double t : part_times) m = std::max(m, t);
  return m;
}

double aggregate_time(const std::vector<double>& part_times) {
  double s = 0.0;
  for (double t : part_times) s += t;
  return s;
}

void score_parts(Decomposition& d, const ObjectiveParams& params, const TimeCalibration& cal) {
  std::vector<double> times;
  d.parallel_score = 0.0;
  for (Part& part : d.parts) {
    part.print_score = print_score(part.volume, part.surface_area, params);
    part.est_time = estimate_time(part.volume, part.surface_area, params, cal);
    d.parallel_score = std::max(d.parallel_score, part.print_score);
    times.push_back(part.est_time);
  }
  d.parallel_time = parallel_time(times);
  d.aggregate_time = aggregate_time(times);
  d.printers_used = static_cast<int>(d.parts.size());
}

namespace {

PreparedPiece prepare_piece(const TaggedMesh& source, const SymmetryPlane& symmetry, const ObjectiveParams& params,
                            Granularity granularity) {
  Oriented o = optimize_orientation(source.mesh, symmetry, params.overhang_tolerance);
  PreparedPiece piece;
  piece.pose = o.pose;
  piece.mesh = TaggedMesh{std::move(o.mesh), source.cap};
  piece.grid = build_grid(piece.mesh.mesh, granularity);
  classify_cells(piece.grid, piece.mesh.mesh, params.overhang_tolerance);
  return piece;
}

Part make_part(const TaggedMesh& clipped, const Pose& to_model, int piece, const Block& block, bool from_resolve) {
  Part part;
  part.mesh = transformed(clipped.mesh, to_model.rotation, to_model.translation);
  part.cap = clipped.cap;
  part.piece = piece;
  part.block = block.id;
  part.lo = block.lo;
  part.hi = block.hi;
  part.from_resolve = from_resolve;
  const MeshMeasures m = measure(clipped.mesh);
  part.volume = m.volume;
  part.surface_area = m.surface_area;
  part.cap_free_area = clipped.cap_free_area();
  return part;
}

}  // namespace

PreparedModel prepare_model(const TriangleMesh& mesh, const RunPlan& plan) {
  if (mesh.empty()) throw EmptyMesh();
  PreparedModel model;
  model.mesh = mesh;
  model.measures = measure(mesh);
  model.watertight = validate_watertight(mesh).is_watertight;
  model.symmetry = find_best_symmetry_plane(mesh);
  model.whole.push_back(prepare_piece(TaggedMesh::from(mesh), model.symmetry, plan.objective, plan.granularity));
  if (!plan.skip_symmetry && model.watertight && model.symmetry.error_score <= plan.symmetry_threshold) {
    SymmetryCut cut = maybe_symmetry_cut(mesh, plan.symmetry_threshold);
    if (cut.cut && cut.parts.size() == 2) {
      for (const TaggedMesh& half : cut.parts) {
        model.halves.push_back(prepare_piece(half, cut.plane, plan.objective, plan.granularity));
      }
    }
  }
  return model;
}

std::pair<int, int> split_printers(int printers, double volume_a, double volume_b) {
  const double total = volume_a + volume_b;
  int a = total > 0 ? static_cast<int>(std::lround(printers * volume_a / total)) : printers / 2;
  a = std::clamp(a, 1, printers - 1);
  return {a, printers - a};
}

Decomposition run_pipeline_once(const PreparedModel& model, const RunPlan& plan, int printers_for_growth,
                                 std::uint64_t seed) {
  if (printers_for_growth < 1) throw Error("printers_for_growth must be at least 1");
  Decomposition d;
  d.seed = seed;
  d.printers_available = plan.printers_available;
  d.printers_grown = printers_for_growth;

  const bool cut = printers_for_growth >= 2 && model.halves.size() == 2;
  const std::vector<PreparedPiece>& pieces = cut ? model.halves : model.whole;
  d.symmetry_cut = cut;

  std::vector<int> grown(pieces.size(), printers_for_growth);
  if (cut) {
    const auto [a, b] = split_printers(printers_for_growth, measure(pieces[0].mesh.mesh).volume,
                                       measure(pieces[1].mesh.mesh).volume);
    grown = {a, b};
  }

  int free_printers = std::max(0, plan.printers_available - printers_for_growth);
  bool covered = true;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const PreparedPiece& piece = pieces[i];
    GrowthState state{piece.grid, {}};
    const std::uint64_t piece_seed = seed + 0x9E3779B97F4A7C15ull * i;
    state.blocks = select_seed_blocks(state.grid, piece.mesh.mesh, grown[i], piece_seed);
    for (Block& b : state.blocks) b = claim_block(state.grid, b.id, b.lo, b.hi);
    grow_blocks(state, plan.objective);

    const std::size_t grown_count = state.blocks.size();
    std::vector<Block> regions = get_discrete_empty_regions(state.grid, free_printers, plan.objective.printer_dims,
                                                            static_cast<int>(grown_count));
    free_printers -= static_cast<int>(regions.size());
    covered = covered && solid_coverage_complete(state.grid);

    std::vector<Block> all = state.blocks;
    all.insert(all.end(), regions.begin(), regions.end());
    const Pose back = piece.pose.inverse();
    for (std::size_t b = 0; b < all.size(); ++b) {
      const TaggedMesh clipped =
          clip_tagged(piece.mesh, state.grid.box_of(all[b].lo, all[b].hi), model.watertight);
      if (clipped.empty()) continue;
      if (!fits_printer(aabb_of(clipped.mesh).extent(), plan.objective.printer_dims) && d.reason.empty()) {
        d.reason = "part exceeds printer volume";
      }
      d.parts.push_back(make_part(clipped, back, static_cast<int>(i), all[b], b >= grown_count));
    }

    std::vector<int> owners(state.grid.size());
    for (std::size_t c = 0; c < state.grid.size(); ++c) owners[c] = state.grid.cells[c].owner;
    d.grid_dims.push_back(state.grid.dims);
    d.ownership.push_back(std::move(owners));
  }

  score_parts(d, plan.objective, plan.calibration);
  if (!covered) d.reason = "solid cells left unassigned";
  else if (d.parts.empty()) d.reason = "no parts";
  else if (d.printers_used > plan.printers_available) d.reason = "more parts than printers";
  d.valid = d.reason.empty();
  return d;
}

Decomposition run_pipeline_once(const TriangleMesh& mesh, const RunPlan& plan, int printers_for_growth,
                                std::uint64_t seed) {
  return run_pipeline_once(prepare_model(mesh, plan), plan, printers_for_growth, seed);
}

nlohmann::json to_json(const IterationRecord& r) {
  nlohmann::json j;
  j["p"] = r.printers;
  j["try"] = r.attempt;
  j["seed"] = r.seed;
  j["valid"] = r.valid;
  j["parts"] = r.parts;
  j["printers_used"] = r.printers_used;
  j["parallel_score"] = r.parallel_score;
  j["parallel_time"] = r.parallel_time;
  j["aggregate_time"] = r.aggregate_time;
  j["part_scores"] = r.part_scores;
  j["wall_clock"] = r.wall_clock;
  if (!r.reason.empty()) j["reason"] = r.reason;
  return j;
}

bool better_decomposition(const Decomposition& a, const Decomposition& b) {
  if (a.parallel_score != b.parallel_score) return a.parallel_score < b.parallel_score;
  if (a.printers_used != b.printers_used) return a.printers_used < b.printers_used;
  return a.aggregate_time < b.aggregate_time;
}

MetaResult run_metaheuristic(const TriangleMesh& mesh, const RunPlan& plan,
                             const std::function<void(const Decomposition&)>& on_iteration) {
  MetaResult result = search_decompositions(mesh, plan, on_iteration);
  if (!result.found) throw NoValidDecomposition();
  return result;
}

MetaResult search_decompositions(const TriangleMesh& mesh, const RunPlan& plan,
                                 const std::function<void(const Decomposition&)>& on_iteration) {
  if (plan.printers_available < 1) throw Error("printers_available must be at least 1");
  if (plan.sample_tries < 1) throw Error("sample_tries must be at least 1");
  const PreparedModel model = prepare_model(mesh, plan);

  MetaResult result;
  const int lowest = std::clamp(plan.min_printers, 1, plan.printers_available);
  for (int p = plan.printers_available; p >= lowest; --p) {
    for (int t = 1; t <= plan.sample_tries; ++t) {
      const auto start = std::chrono::steady_clock::now();
      IterationRecord rec;
      rec.printers = p;
      rec.attempt = t;
      rec.seed = iteration_seed(plan.rng_seed, p, t);
      Decomposition d;
      try {
        d = run_pipeline_once(model, plan, p, rec.seed);
      } catch (const InsufficientBoundaryCells& e) {
        d.seed = rec.seed;
        d.printers_available = plan.printers_available;
        d.printers_grown = p;
        d.reason = e.what();
      }
      rec.valid = d.valid;
      rec.parts = d.parts.size();
      rec.printers_used = d.printers_used;
      rec.parallel_score = d.parallel_score;
      rec.parallel_time = d.parallel_time;
      rec.aggregate_time = d.aggregate_time;
      for (const Part& part : d.parts) rec.part_scores.push_back(part.print_score);
      rec.reason = d.reason;
      rec.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      result.log.push_back(std::move(rec));
      if (on_iteration) on_iteration(d);
      if (d.valid && (!result.found || better_decomposition(d, result.best))) {
        result.best = std::move(d);
        result.found = true;
      }
    }
  }
  return result;
}

Decomposition recursive_symmetry_baseline(const TriangleMesh& mesh, int printers, const ObjectiveParams& params,
                                          const TimeCalibration& cal) {
  if (printers < 1) throw Error("printers must be at least 1");
  if (mesh.empty()) throw EmptyMesh();
  std::size_t target = 1;
  while (target * 2 <= static_cast<std::size_t>(printers)) target *= 2;

  const bool watertight = validate_watertight(mesh).is_watertight;
  std::vector<TaggedMesh> parts{TaggedMesh::from(mesh)};
  while (parts.size() < target) {
    std::vector<TaggedMesh> next;
    for (const TaggedMesh& part : parts) {
      const SymmetryPlane best = find_best_symmetry_plane(part.mesh);
      SplitResult s = split_by_plane(part, best.plane(), watertight);
      if (s.positive.empty() || s.negative.empty()) {
        next.push_back(part);
      } else {
        next.push_back(std::move(s.positive));
        next.push_back(std::move(s.negative));
      }
    }
    if (next.size() == parts.size()) break;
    parts = std::move(next);
  }

  Decomposition d;
  d.algorithm = "symmetry";
  d.printers_available = printers;
  d.printers_grown = printers;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    Part part;
    part.mesh = parts[i].mesh;
    part.cap = parts[i].cap;
    part.block = static_cast<int>(i);
    const MeshMeasures m = measure(part.mesh);
    part.volume = m.volume;
    part.surface_area = m.surface_area;
    part.cap_free_area = parts[i].cap_free_area();
    if (!fits_printer(aabb_of(part.mesh).extent(), params.printer_dims) && d.reason.empty()) {
      d.reason = "part exceeds printer volume";
    }
    d.parts.push_back(std::move(part));
  }
  score_parts(d, params, cal);
  d.valid = d.reason.empty();
  return d;
}

}  // namespace parallelobox
