#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "parallelobox/grid.hpp"
#include "parallelobox/mesh.hpp"

namespace parallelobox {

struct ObjectiveParams {
  double speed_infill = 20.0;       // mm/s
  double speed_shell = 20.0;        // mm/s
  double infill_fraction = 0.05;
  double overhang_tolerance = 1.0;  // degrees
  Vec3 printer_dims = Vec3(250.0, 250.0, 250.0);
  double overhang_weight = 1.0;
  double proximity_floor = 1.0;     // grid units
};

/// Inclusive cell range [lo, hi] plus the summed measures of its cells.
struct Block {
  int id = 0;
  Coord lo{};
  Coord hi{};
  CellMeasures measures;
  std::size_t cell_count = 0;  // owned (non-external) cells

  Coord extent() const { return {hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1}; }
};

struct GrowthOption {
  int block = 0;
  Direction direction = Direction::PosX;
  double score = -1.0;  // -1 when the growth is forbidden
};

struct GrowthState {
  Grid grid;
  std::vector<Block> blocks;
};

struct GrowthStep {
  int iteration = 0;
  int block = 0;
  Direction direction = Direction::PosX;
  double score = 0.0;
};

/// P = speed_infill * infill_fraction * volume + speed_shell * area.
double print_score(double volume, double surface_area, const ObjectiveParams& params);

/// Smallest overhang area over the six build-up directions.
double min_overhang(const CellMeasures& m);

/// Overhang score of the mesh surface inside the block's box, computed from
/// a fresh surface-only clip.
double overhang_score(const Block& block, const Grid& grid, const TriangleMesh& mesh, const ObjectiveParams& params);

/// Sorted-dimension comparison, so parts may be turned before printing.
bool fits_printer(const Vec3& dims, const Vec3& printer_dims);
bool block_fits(const Grid& grid, const Coord& lo, const Coord& hi, const Vec3& printer_dims);

/// Half the L1 extent of a cell range, in grid units.
double block_size(const Coord& lo, const Coord& hi);

/// Smallest L1 center distance minus sizes to every block other than
/// `self`; +infinity when there is none.
double proximity(const Coord& lo, const Coord& hi, int self, const std::vector<Block>& blocks);

/// Cells of `grid` owned by block `id`.
std::vector<Coord> owned_cells(const Grid& grid, int id);

/// Marks every non-external cell of [lo, hi] as owned by a new block.
Block claim_block(Grid& grid, int id, const Coord& lo, const Coord& hi);

/// True while some non-external cell has no owner.
bool has_unassigned_cells(const Grid& grid);

/**
 * k-means++ on the mesh vertices, then each centroid maps to its nearest
 * unoccupied boundary cell. The returned unit blocks are not yet claimed.
 * Throws InsufficientBoundaryCells.
 */
std::vector<Block> select_seed_blocks(const Grid& grid, const TriangleMesh& mesh, int k, std::uint64_t rng_seed);

/**
 * Cost of growing `block` one layer in `direction`:
 * (P + w * O) / max(proximity, floor), or -1 when the grown box leaves the
 * grid, outgrows the printer, adds no solid cell or overlaps another block.
 */
GrowthOption score_growth(const GrowthState& state, int block, Direction direction, const ObjectiveParams& params);

/// Applies a growth: extends the box and claims the new layer.
void apply_growth(GrowthState& state, int block, Direction direction);

/**
 * Serial growth: each iteration applies the cheapest positive option (ties
 * to the lower block id, then direction order) until every solid cell is
 * owned or nothing can grow. `trace` receives "iteration,block,direction,
 * score" rows; `on_step` sees the state after each step.
 */
std::vector<GrowthStep> grow_blocks(GrowthState& state, const ObjectiveParams& params, std::ostream* trace = nullptr,
                                    const std::function<void(const GrowthState&)>& on_step = {});

}  // namespace parallelobox
