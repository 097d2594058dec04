#pragma once

#include <optional>
#include <vector>

#include "parallelobox/blocks.hpp"
#include "parallelobox/clip.hpp"
#include "parallelobox/grid.hpp"

namespace parallelobox {

/// First unowned boundary cell in (x, y, z) lexicographic order, else the
/// first unowned internal cell.
std::optional<Coord> next_unassigned_cell(const Grid& grid);

/**
 * Void filling. Up to `num_free_printers` times: seed a unit box at the next
 * unassigned cell, then sweep +X, -X, +Y, -Y, +Z, -Z growing one layer in
 * every direction that stays in the grid, fits the printer and touches no
 * owned cell, until a full sweep changes nothing. Each region claims its
 * cells before the next one starts. Ids start at `first_id`.
 */
std::vector<Block> get_discrete_empty_regions(Grid& grid, int num_free_printers, const Vec3& printer_dims, int first_id);

/// Volumetric clip of the parent to each region's box. Cap flags of the
/// parent are kept, so cap_free_area() counts only original surface.
std::vector<TaggedMesh> assign_mesh_boxes(const TaggedMesh& parent, const Grid& grid, const std::vector<Block>& regions);

/// No boundary cell lacks an owner.
bool coverage_complete(const Grid& grid);

/// No boundary or internal cell lacks an owner.
bool solid_coverage_complete(const Grid& grid);

}  // namespace parallelobox
