#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "parallelobox/mesh.hpp"

namespace parallelobox {

/// The bounding box is enlarged by this factor before the grid is laid out.
inline constexpr double kGridBoxScale = 1.001;

enum class Granularity { Coarse, Medium, Fine, VeryFine };

int cells_along_longest_axis(Granularity g);
Granularity parse_granularity(std::string_view text);
std::string to_string(Granularity g);

using Coord = std::array<int, 3>;

/// Growth directions in tie-break order: +X, -X, +Y, -Y, +Z, -Z.
enum class Direction : std::uint8_t { PosX, NegX, PosY, NegY, PosZ, NegZ };
inline constexpr std::array<Direction, 6> kDirections{Direction::PosX, Direction::NegX, Direction::PosY,
                                                      Direction::NegY, Direction::PosZ, Direction::NegZ};
inline int axis_of(Direction d) { return static_cast<int>(d) / 2; }
inline bool is_positive(Direction d) { return static_cast<int>(d) % 2 == 0; }
/// Unit vector of a direction.
Vec3 direction_vector(Direction d);
std::string to_string(Direction d);

enum class CellClass : std::uint8_t { External, Boundary, Internal };
std::string to_string(CellClass c);

inline constexpr int kNoOwner = -1;

/// Clipped geometry of one cell. Overhang areas are indexed by build-up
/// direction (same order as Direction); cut faces are excluded.
struct CellMeasures {
  double volume = 0.0;
  double surface_area = 0.0;
  std::array<double, 6> overhang{};

  CellMeasures& operator+=(const CellMeasures& o);
};

struct Cell {
  Coord coord{};
  CellClass classification = CellClass::External;
  int owner = kNoOwner;
  std::size_t clipped_surface_vertex_count = 0;
  CellMeasures measures;
};

struct Grid {
  Vec3 origin = Vec3::Zero();
  double cell_size = 1.0;
  Coord dims{1, 1, 1};
  std::vector<Cell> cells;  // x fastest, then y, then z

  std::size_t size() const { return cells.size(); }
  bool in_bounds(const Coord& c) const {
    return c[0] >= 0 && c[1] >= 0 && c[2] >= 0 && c[0] < dims[0] && c[1] < dims[1] && c[2] < dims[2];
  }
  std::size_t index(const Coord& c) const {
    return static_cast<std::size_t>(c[0]) +
           static_cast<std::size_t>(dims[0]) * (static_cast<std::size_t>(c[1]) + static_cast<std::size_t>(dims[1]) * c[2]);
  }
  Cell& at(const Coord& c) { return cells[index(c)]; }
  const Cell& at(const Coord& c) const { return cells[index(c)]; }

  /// Grid plane k-coordinate i in model space.
  double plane(int k, int i) const { return origin[k] + i * cell_size; }
  Vec3 cell_center(const Coord& c) const;
  Aabb cell_box(const Coord& c) const { return box_of(c, c); }
  /// Physical box spanned by the inclusive cell range [lo, hi].
  Aabb box_of(const Coord& lo, const Coord& hi) const;
  std::size_t count(CellClass c) const;
};

/// Lays a cubic grid over the bounding box scaled by kGridBoxScale.
Grid build_grid(const TriangleMesh& mesh, Granularity granularity);

/**
 * Classifies every cell and fills its measures. The surface is cut into
 * slabs, columns and cells by successive plane splits, so each triangle is
 * only clipped against the planes it crosses. A cell is boundary when input
 * surface survives in it; otherwise internal when it lies inside the solid.
 * Open meshes fall back to majority-vote ray parity and a sampled volume
 * estimate.
 */
void classify_cells(Grid& grid, const TriangleMesh& mesh, double overhang_tolerance_deg = 1.0);

/// Reference classification: one surface-only box clip and one containment
/// test per cell, visited in `order` (all cells when empty). Measures are
/// left untouched.
void classify_cells_direct(Grid& grid, const TriangleMesh& mesh, const std::vector<std::size_t>& order = {});

/// Writes "x,y,z,class,owner" rows.
void write_voxel_csv(const Grid& grid, std::ostream& out);

}  // namespace parallelobox
