#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "parallelobox/blocks.hpp"
#include "parallelobox/clip.hpp"
#include "parallelobox/grid.hpp"
#include "parallelobox/preprocess.hpp"

namespace parallelobox {

struct TimeCalibration {
  double line_width = 0.4;    // mm
  double layer_height = 0.25; // mm
};

/// Infill volume and one-line-thick walls laid down at the printer speeds.
double estimate_time(double volume, double surface_area, const ObjectiveParams& params, const TimeCalibration& cal);

double parallel_time(const std::vector<double>& part_times);
double aggregate_time(const std::vector<double>& part_times);

struct RunPlan {
  int printers_available = 1;
  int min_printers = 1;  // lowest budget the outer loop tries
  int sample_tries = 3;
  Granularity granularity = Granularity::VeryFine;
  std::uint64_t rng_seed = 0;
  ObjectiveParams objective;
  TimeCalibration calibration;
  bool skip_symmetry = false;
  double symmetry_threshold = kDefaultSymmetryThreshold;
};

struct Part {
  TriangleMesh mesh;               // model frame
  std::vector<std::uint8_t> cap;   // faces that are not input surface
  int piece = 0;                   // symmetry half, 0 when uncut
  int block = 0;                   // block id within the piece
  Coord lo{}, hi{};                // cell range in the piece's grid
  bool from_resolve = false;
  double volume = 0.0;
  double surface_area = 0.0;       // including cut faces
  double cap_free_area = 0.0;
  double print_score = 0.0;
  double est_time = 0.0;           // seconds
};

struct Decomposition {
  std::string algorithm = "parallelobox";
  std::vector<Part> parts;
  double parallel_score = 0.0;
  double parallel_time = 0.0;
  double aggregate_time = 0.0;
  int printers_available = 0;
  int printers_grown = 0;
  int printers_used = 0;
  bool symmetry_cut = false;
  bool valid = false;
  std::string reason;
  std::uint64_t seed = 0;
  std::vector<Coord> grid_dims;             // per piece
  std::vector<std::vector<int>> ownership;  // cell owners per piece grid, x fastest
};

/// Fills part scores and the parallel/aggregate figures.
void score_parts(Decomposition& d, const ObjectiveParams& params, const TimeCalibration& cal);

/// Work that does not depend on the printer budget or the seed: symmetry
/// detection and cut, orientation, grid classification.
struct PreparedPiece {
  TaggedMesh mesh;  // oriented frame, cap flags of the symmetry cut
  Pose pose;        // input frame -> oriented frame
  Grid grid;        // classified
};

struct PreparedModel {
  TriangleMesh mesh;
  MeshMeasures measures;
  bool watertight = false;
  SymmetryPlane symmetry;
  std::vector<PreparedPiece> whole;   // one piece
  std::vector<PreparedPiece> halves;  // two pieces when the model is symmetric enough
};

PreparedModel prepare_model(const TriangleMesh& mesh, const RunPlan& plan);

/// Printers for each symmetry half, proportional to volume, each >= 1.
std::pair<int, int> split_printers(int printers, double volume_a, double volume_b);

/**
 * One pass of the pipeline with `printers_for_growth` seeds; leftover
 * printers feed conflict resolution. Throws InsufficientBoundaryCells;
 * other failures give valid = false with a reason.
 */
Decomposition run_pipeline_once(const PreparedModel& model, const RunPlan& plan, int printers_for_growth,
                                 std::uint64_t seed);
Decomposition run_pipeline_once(const TriangleMesh& mesh, const RunPlan& plan, int printers_for_growth,
                                std::uint64_t seed);

struct IterationRecord {
  int printers = 0;
  int attempt = 0;
  std::uint64_t seed = 0;
  bool valid = false;
  std::size_t parts = 0;
  int printers_used = 0;
  double parallel_score = 0.0;
  double parallel_time = 0.0;
  double aggregate_time = 0.0;
  std::vector<double> part_scores;
  double wall_clock = 0.0;  // seconds
  std::string reason;
};

nlohmann::json to_json(const IterationRecord& r);

struct MetaResult {
  Decomposition best;
  bool found = false;  // some iteration was valid
  std::vector<IterationRecord> log;
};

inline std::uint64_t iteration_seed(std::uint64_t base, int printers, int attempt) {
  return base + 1000ull * static_cast<std::uint64_t>(printers) + static_cast<std::uint64_t>(attempt);
}

/// True when `a` beats `b`: lower parallel score, then fewer printers, then
/// lower aggregate time.
bool better_decomposition(const Decomposition& a, const Decomposition& b);

/**
 * Outer loop over printer budgets from printers_available down to
 * min_printers, inner loop over sample_tries seeds; returns the best valid
 * decomposition and the per-iteration log. Throws NoValidDecomposition.
 */
MetaResult run_metaheuristic(const TriangleMesh& mesh, const RunPlan& plan,
                             const std::function<void(const Decomposition&)>& on_iteration = {});

/// Same search, but reports "no valid iteration" through `found` so the log
/// survives.
MetaResult search_decompositions(const TriangleMesh& mesh, const RunPlan& plan,
                                 const std::function<void(const Decomposition&)>& on_iteration = {});

/// Breadth-first cuts at each part's best symmetry plane until the part
/// count reaches the largest power of two not above `printers`.
Decomposition recursive_symmetry_baseline(const TriangleMesh& mesh, int printers, const ObjectiveParams& params,
                                          const TimeCalibration& cal);

}  // namespace parallelobox
