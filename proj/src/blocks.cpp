#include "parallelobox/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "parallelobox/clip.hpp"
#include "parallelobox/errors.hpp"

namespace parallelobox {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Cell range of the layer added by growing [lo, hi] in direction d.
std::pair<Coord, Coord> new_layer(const Coord& lo, const Coord& hi, Direction d) {
  const int k = axis_of(d);
  Coord a = lo, b = hi;
  if (is_positive(d)) a[k] = b[k] = hi[k] + 1;
  else a[k] = b[k] = lo[k] - 1;
  return {a, b};
}

template <typename F>
void for_range(const Coord& lo, const Coord& hi, F&& f) {
  for (int z = lo[2]; z <= hi[2]; ++z) {
    for (int y = lo[1]; y <= hi[1]; ++y) {
      for (int x = lo[0]; x <= hi[0]; ++x) f(Coord{x, y, z});
    }
  }
}

}  // namespace

double print_score(double volume, double surface_area, const ObjectiveParams& params) {
  return params.speed_infill * (params.infill_fraction * volume) + params.speed_shell * surface_area;
}

double min_overhang(const CellMeasures& m) { return *std::min_element(m.overhang.begin(), m.overhang.end()); }

double overhang_score(const Block& block, const Grid& grid, const TriangleMesh& mesh, const ObjectiveParams& params) {
  const ClipResult r = clip_to_box(mesh, grid.box_of(block.lo, block.hi), ClipMode::SurfaceOnly);
  const double limit = std::sin(params.overhang_tolerance * M_PI / 180.0);
  double best = std::numeric_limits<double>::infinity();
  for (Direction d : kDirections) {
    const Vec3 up = direction_vector(d);
    double area = 0.0;
    for (std::size_t t = 0; t < r.mesh.triangles.size(); ++t) {
      const Vec3 c = r.mesh.face_cross(t);
      const double len = c.norm();
      if (len > 0 && -c.dot(up) / len > limit) area += 0.5 * len;
    }
    best = std::min(best, area);
  }
  return best;
}

bool fits_printer(const Vec3& dims, const Vec3& printer_dims) {
  std::array<double, 3> a{dims.x(), dims.y(), dims.z()}, b{printer_dims.x(), printer_dims.y(), printer_dims.z()};
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (int k = 0; k < 3; ++k) {
    if (a[k] > b[k] * (1.0 + 1e-12)) return false;
  }
  return true;
}

bool block_fits(const Grid& grid, const Coord& lo, const Coord& hi, const Vec3& printer_dims) {
  return fits_printer(grid.box_of(lo, hi).extent(), printer_dims);
}

double block_size(const Coord& lo, const Coord& hi) {
  return 0.5 * ((hi[0] - lo[0] + 1) + (hi[1] - lo[1] + 1) + (hi[2] - lo[2] + 1));
}

double proximity(const Coord& lo, const Coord& hi, int self, const std::vector<Block>& blocks) {
  double best = std::numeric_limits<double>::infinity();
  const double size = block_size(lo, hi);
  for (const Block& b : blocks) {
    if (b.id == self) continue;
    double l1 = 0.0;
    for (int k = 0; k < 3; ++k) l1 += std::abs(0.5 * (lo[k] + hi[k]) - 0.5 * (b.lo[k] + b.hi[k]));
    best = std::min(best, l1 - (size + block_size(b.lo, b.hi)));
  }
  return best;
}

std::vector<Coord> owned_cells(const Grid& grid, int id) {
  std::vector<Coord> out;
  for (const Cell& c : grid.cells) {
    if (c.owner == id) out.push_back(c.coord);
  }
  return out;
}

Block claim_block(Grid& grid, int id, const Coord& lo, const Coord& hi) {
  Block b;
  b.id = id;
  b.lo = lo;
  b.hi = hi;
  for_range(lo, hi, [&](const Coord& c) {
    Cell& cell = grid.at(c);
    if (cell.classification == CellClass::External) return;
    cell.owner = id;
    b.measures += cell.measures;
    ++b.cell_count;
  });
  return b;
}

bool has_unassigned_cells(const Grid& grid) {
  return std::any_of(grid.cells.begin(), grid.cells.end(),
                     [](const Cell& c) { return c.classification != CellClass::External && c.owner == kNoOwner; });
}

std::vector<Block> select_seed_blocks(const Grid& grid, const TriangleMesh& mesh, int k, std::uint64_t rng_seed) {
  std::vector<std::size_t> boundary;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.cells[i].classification == CellClass::Boundary) boundary.push_back(i);
  }
  if (k < 1 || static_cast<std::size_t>(k) > boundary.size()) {
    throw InsufficientBoundaryCells(k, static_cast<int>(boundary.size()));
  }
  const std::vector<Vec3>& pts = mesh.vertices;
  if (pts.empty()) throw EmptyMesh();
  std::mt19937_64 rng(rng_seed);

  // D^2 seeding.
  std::vector<Vec3> centers;
  centers.push_back(pts[std::min(pts.size() - 1, static_cast<std::size_t>(uniform01(rng) * pts.size()))]);
  std::vector<double> d2(pts.size(), std::numeric_limits<double>::infinity());
  while (centers.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      d2[i] = std::min(d2[i], (pts[i] - centers.back()).squaredNorm());
      total += d2[i];
    }
    std::size_t pick = pts.size() - 1;
    if (total > 0.0) {
      const double r = uniform01(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        acc += d2[i];
        if (r < acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = std::min(pts.size() - 1, static_cast<std::size_t>(uniform01(rng) * pts.size()));
    }
    centers.push_back(pts[pick]);
  }

  // Lloyd iterations.
  const double tol = 1e-4 * grid.cell_size;
  std::vector<Vec3> sums(centers.size());
  std::vector<std::size_t> counts(centers.size());
  for (int iter = 0; iter < 100; ++iter) {
    std::fill(sums.begin(), sums.end(), Vec3::Zero());
    std::fill(counts.begin(), counts.end(), 0);
    for (const Vec3& p : pts) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = (p - centers[c]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      sums[best] += p;
      ++counts[best];
    }
    double moved = 0.0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (counts[c] == 0) continue;
      const Vec3 next = sums[c] / static_cast<double>(counts[c]);
      moved = std::max(moved, (next - centers[c]).norm());
      centers[c] = next;
    }
    if (moved < tol) break;
  }

  // The containing cell's center is the nearest one, so "containing cell,
  // else nearest boundary cell, else next-nearest free one" is a single
  // nearest-free-boundary-cell query.
  std::vector<char> taken(grid.size(), 0);
  std::vector<Block> seeds;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    std::size_t best = grid.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i : boundary) {
      if (taken[i]) continue;
      const double d = (grid.cell_center(grid.cells[i].coord) - centers[c]).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    taken[best] = 1;
    Block b;
    b.id = static_cast<int>(c);
    b.lo = b.hi = grid.cells[best].coord;
    b.measures = grid.cells[best].measures;
    b.cell_count = 1;
    seeds.push_back(b);
  }
  return seeds;
}

GrowthOption score_growth(const GrowthState& state, int block, Direction direction, const ObjectiveParams& params) {
  GrowthOption opt{block, direction, -1.0};
  const Grid& grid = state.grid;
  const Block& b = state.blocks[block];
  const auto [a, z] = new_layer(b.lo, b.hi, direction);
  if (!grid.in_bounds(a) || !grid.in_bounds(z)) return opt;

  Coord lo = b.lo, hi = b.hi;
  const int k = axis_of(direction);
  if (is_positive(direction)) hi[k] += 1;
  else lo[k] -= 1;
  if (!block_fits(grid, lo, hi, params.printer_dims)) return opt;

  CellMeasures grown = b.measures;
  bool any_solid = false, overlap = false;
  for_range(a, z, [&](const Coord& c) {
    const Cell& cell = grid.at(c);
    if (cell.classification == CellClass::External) return;
    any_solid = true;
    if (cell.owner != kNoOwner && cell.owner != b.id) overlap = true;
    grown += cell.measures;
  });
  if (!any_solid || overlap) return opt;

  const double cost = print_score(grown.volume, grown.surface_area, params) + params.overhang_weight * min_overhang(grown);
  const double prox = proximity(lo, hi, b.id, state.blocks);
  const double divisor = std::isinf(prox) ? params.proximity_floor : std::max(prox, params.proximity_floor);
  opt.score = std::max(cost / divisor, std::numeric_limits<double>::min());
  return opt;
}

void apply_growth(GrowthState& state, int block, Direction direction) {
  Block& b = state.blocks[block];
  const auto [a, z] = new_layer(b.lo, b.hi, direction);
  for_range(a, z, [&](const Coord& c) {
    Cell& cell = state.grid.at(c);
    if (cell.classification == CellClass::External) return;
    cell.owner = b.id;
    b.measures += cell.measures;
    ++b.cell_count;
  });
  const int k = axis_of(direction);
  if (is_positive(direction)) b.hi[k] += 1;
  else b.lo[k] -= 1;
}

std::vector<GrowthStep> grow_blocks(GrowthState& state, const ObjectiveParams& params, std::ostream* trace,
                                    const std::function<void(const GrowthState&)>& on_step) {
  std::vector<GrowthStep> steps;
  if (trace) *trace << "iteration,block,direction,score\n";
  std::size_t unassigned = 0;
  for (const Cell& c : state.grid.cells) unassigned += c.classification != CellClass::External && c.owner == kNoOwner;

  while (unassigned > 0) {
    GrowthOption best;
    for (std::size_t b = 0; b < state.blocks.size(); ++b) {
      for (Direction d : kDirections) {
        const GrowthOption opt = score_growth(state, static_cast<int>(b), d, params);
        if (opt.score > 0 && (best.score <= 0 || opt.score < best.score)) best = opt;
      }
    }
    if (best.score <= 0) break;
    const std::size_t before = state.blocks[best.block].cell_count;
    apply_growth(state, best.block, best.direction);
    unassigned -= state.blocks[best.block].cell_count - before;
    GrowthStep step{static_cast<int>(steps.size()), best.block, best.direction, best.score};
    if (trace) *trace << step.iteration << ',' << step.block << ',' << to_string(step.direction) << ',' << step.score << '\n';
    steps.push_back(step);
    if (on_step) on_step(state);
  }
  return steps;
}

}  // namespace parallelobox
