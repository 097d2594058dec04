#include "parallelobox/resolve.hpp"

#include <algorithm>

namespace parallelobox {

namespace {

bool layer_free(const Grid& grid, const Coord& lo, const Coord& hi, Direction d) {
  const int k = axis_of(d);
  Coord a = lo, b = hi;
  a[k] = b[k] = is_positive(d) ? hi[k] + 1 : lo[k] - 1;
  if (!grid.in_bounds(a) || !grid.in_bounds(b)) return false;
  for (int z = a[2]; z <= b[2]; ++z) {
    for (int y = a[1]; y <= b[1]; ++y) {
      for (int x = a[0]; x <= b[0]; ++x) {
        if (grid.at({x, y, z}).owner != kNoOwner) return false;
      }
    }
  }
  return true;
}

std::optional<Coord> first_unowned(const Grid& grid, CellClass cls) {
  for (int x = 0; x < grid.dims[0]; ++x) {
    for (int y = 0; y < grid.dims[1]; ++y) {
      for (int z = 0; z < grid.dims[2]; ++z) {
        const Cell& c = grid.at({x, y, z});
        if (c.classification == cls && c.owner == kNoOwner) return c.coord;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Coord> next_unassigned_cell(const Grid& grid) {
  if (auto c = first_unowned(grid, CellClass::Boundary)) return c;
  return first_unowned(grid, CellClass::Internal);
}

std::vector<Block> get_discrete_empty_regions(Grid& grid, int num_free_printers, const Vec3& printer_dims, int first_id) {
  std::vector<Block> regions;
  for (int iteration = 0; iteration < num_free_printers; ++iteration) {
    const auto start = next_unassigned_cell(grid);
    if (!start) continue;
    Coord lo = *start, hi = *start;
    bool expanded = true;
    while (expanded) {
      expanded = false;
      for (Direction d : kDirections) {
        if (!layer_free(grid, lo, hi, d)) continue;
        Coord nlo = lo, nhi = hi;
        const int k = axis_of(d);
        if (is_positive(d)) nhi[k] += 1;
        else nlo[k] -= 1;
        if (!block_fits(grid, nlo, nhi, printer_dims)) continue;
        lo = nlo;
        hi = nhi;
        expanded = true;
      }
    }
    regions.push_back(claim_block(grid, first_id + static_cast<int>(regions.size()), lo, hi));
  }
  return regions;
}

std::vector<TaggedMesh> assign_mesh_boxes(const TaggedMesh& parent, const Grid& grid, const std::vector<Block>& regions) {
  std::vector<TaggedMesh> parts;
  parts.reserve(regions.size());
  for (const Block& r : regions) parts.push_back(clip_tagged(parent, grid.box_of(r.lo, r.hi), true));
  return parts;
}

bool coverage_complete(const Grid& grid) {
  return std::none_of(grid.cells.begin(), grid.cells.end(),
                      [](const Cell& c) { return c.classification == CellClass::Boundary && c.owner == kNoOwner; });
}

bool solid_coverage_complete(const Grid& grid) { return !has_unassigned_cells(grid); }

}  // namespace parallelobox
