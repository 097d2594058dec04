#include "parallelobox/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "parallelobox/clip.hpp"
#include "parallelobox/errors.hpp"

namespace parallelobox {

namespace {

CellMeasures measure_piece(const TaggedMesh& piece, double sin_tol) {
  CellMeasures m;
  const TriangleMesh& mesh = piece.mesh;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (piece.cap[t]) continue;
    const Vec3 c = mesh.face_cross(t);
    const double len = c.norm();
    if (len == 0.0) continue;
    m.surface_area += 0.5 * len;
    for (Direction d : kDirections) {
      if (-c.dot(direction_vector(d)) / len > sin_tol) m.overhang[static_cast<int>(d)] += 0.5 * len;
    }
  }
  return m;
}

// Splits `rest` at the grid planes along axis k and hands each slice to `visit`.
template <typename Visit>
void slice(TaggedMesh rest, const Grid& grid, int k, bool close, Visit&& visit) {
  for (int i = 0; i < grid.dims[k]; ++i) {
    if (i + 1 == grid.dims[k] || rest.empty()) {
      visit(i, std::move(rest));
      rest = TaggedMesh{};
      continue;
    }
    SplitResult s = split_by_plane(rest, Plane::axis(k, grid.plane(k, i + 1)), close);
    visit(i, std::move(s.negative));
    rest = std::move(s.positive);
  }
}

}  // namespace

CellMeasures& CellMeasures::operator+=(const CellMeasures& o) {
  volume += o.volume;
  surface_area += o.surface_area;
  for (int d = 0; d < 6; ++d) overhang[d] += o.overhang[d];
  return *this;
}

int cells_along_longest_axis(Granularity g) {
  switch (g) {
    case Granularity::Coarse: return 8;
    case Granularity::Medium: return 10;
    case Granularity::Fine: return 12;
    case Granularity::VeryFine: return 15;
  }
  return 15;
}

Granularity parse_granularity(std::string_view text) {
  if (text == "coarse") return Granularity::Coarse;
  if (text == "medium") return Granularity::Medium;
  if (text == "fine") return Granularity::Fine;
  if (text == "very_fine") return Granularity::VeryFine;
  throw ConfigError("unknown granularity: " + std::string(text));
}

std::string to_string(Granularity g) {
  switch (g) {
    case Granularity::Coarse: return "coarse";
    case Granularity::Medium: return "medium";
    case Granularity::Fine: return "fine";
    case Granularity::VeryFine: return "very_fine";
  }
  return "very_fine";
}

Vec3 direction_vector(Direction d) {
  const int k = axis_of(d);
  return is_positive(d) ? Vec3::Unit(k) : Vec3(-Vec3::Unit(k));
}

std::string to_string(Direction d) {
  static const char* names[] = {"+X", "-X", "+Y", "-Y", "+Z", "-Z"};
  return names[static_cast<int>(d)];
}

std::string to_string(CellClass c) {
  switch (c) {
    case CellClass::External: return "external";
    case CellClass::Boundary: return "boundary";
    case CellClass::Internal: return "internal";
  }
  return "external";
}

Vec3 Grid::cell_center(const Coord& c) const {
  return {origin.x() + (c[0] + 0.5) * cell_size, origin.y() + (c[1] + 0.5) * cell_size,
          origin.z() + (c[2] + 0.5) * cell_size};
}

Aabb Grid::box_of(const Coord& lo, const Coord& hi) const {
  Aabb b;
  for (int k = 0; k < 3; ++k) {
    b.min[k] = plane(k, lo[k]);
    b.max[k] = plane(k, hi[k] + 1);
  }
  return b;
}

std::size_t Grid::count(CellClass c) const {
  std::size_t n = 0;
  for (const Cell& cell : cells) n += cell.classification == c;
  return n;
}

Grid build_grid(const TriangleMesh& mesh, Granularity granularity) {
  if (mesh.empty()) throw EmptyMesh();
  const Aabb box = aabb_of(mesh).scaled(kGridBoxScale);
  const Vec3 ext = box.extent();
  const double longest = ext.maxCoeff();
  Grid g;
  g.cell_size = longest > 0 ? longest / cells_along_longest_axis(granularity) : 1.0;
  for (int k = 0; k < 3; ++k) g.dims[k] = std::max(1, static_cast<int>(std::ceil(ext[k] / g.cell_size - 1e-9)));
  const Vec3 span(g.dims[0] * g.cell_size, g.dims[1] * g.cell_size, g.dims[2] * g.cell_size);
  g.origin = box.center() - 0.5 * span;
  g.cells.resize(static_cast<std::size_t>(g.dims[0]) * g.dims[1] * g.dims[2]);
  for (int z = 0; z < g.dims[2]; ++z) {
    for (int y = 0; y < g.dims[1]; ++y) {
      for (int x = 0; x < g.dims[0]; ++x) g.at({x, y, z}).coord = {x, y, z};
    }
  }
  return g;
}

void classify_cells(Grid& grid, const TriangleMesh& mesh, double overhang_tolerance_deg) {
  const bool closed = validate_watertight(mesh).is_watertight;
  const double sin_tol = std::sin(overhang_tolerance_deg * M_PI / 180.0);
  const double h = grid.cell_size;
  const double cell_volume = h * h * h;

  // Cells are cut from the surface only; no caps are built. For a closed
  // solid the volume of a cell piece follows from the divergence theorem
  // with the field (0, 0, z - z0): the surface contributes the integral of
  // (z - z0) n_z, the top cross-section contributes h * A_top, and the
  // bottom and side faces contribute nothing. Cross-section areas are
  // carried down each column: A_bottom = A_top + sum of n_z dA.
  std::vector<double> moment(grid.dims[2]), flux(grid.dims[2]);
  slice(TaggedMesh::from(mesh), grid, 0, false, [&](int x, TaggedMesh slab) {
    slice(std::move(slab), grid, 1, false, [&](int y, TaggedMesh column) {
      std::fill(moment.begin(), moment.end(), 0.0);
      std::fill(flux.begin(), flux.end(), 0.0);
      slice(std::move(column), grid, 2, false, [&](int z, TaggedMesh piece) {
        Cell& cell = grid.at({x, y, z});
        cell.owner = kNoOwner;
        cell.clipped_surface_vertex_count = piece.surface_vertex_count();
        cell.measures = measure_piece(piece, sin_tol);
        const double z0 = grid.plane(2, z);
        for (std::size_t t = 0; t < piece.mesh.triangles.size(); ++t) {
          const double nz_area = 0.5 * piece.mesh.face_cross(t).z();
          const double zc = (piece.mesh.corner(t, 0).z() + piece.mesh.corner(t, 1).z() + piece.mesh.corner(t, 2).z()) / 3.0;
          moment[z] += (zc - z0) * nz_area;
          flux[z] += nz_area;
        }
      });

      double area_above = 0.0;
      for (int z = grid.dims[2] - 1; z >= 0; --z) {
        Cell& cell = grid.at({x, y, z});
        const bool surface = cell.clipped_surface_vertex_count > 0;
        if (closed) {
          const double volume = moment[z] + h * area_above;
          cell.measures.volume = std::clamp(volume, 0.0, cell_volume);
          if (surface) cell.classification = CellClass::Boundary;
          else cell.classification = volume > 0.5 * cell_volume ? CellClass::Internal : CellClass::External;
          if (!surface) cell.measures.volume = cell.classification == CellClass::Internal ? cell_volume : 0.0;
          area_above = std::clamp(area_above + flux[z], 0.0, h * h);
          continue;
        }
        const Vec3 c = grid.cell_center(cell.coord);
        if (surface) {
          cell.classification = CellClass::Boundary;
          int inside = 0;
          for (int s = 0; s < 8; ++s) {
            const Vec3 q = c + 0.25 * h * Vec3(s & 1 ? 1 : -1, s & 2 ? 1 : -1, s & 4 ? 1 : -1);
            inside += point_in_mesh_majority(mesh, q);
          }
          cell.measures.volume = cell_volume * inside / 8.0;
        } else if (point_in_mesh_majority(mesh, c)) {
          cell.classification = CellClass::Internal;
          cell.measures.volume = cell_volume;
        } else {
          cell.classification = CellClass::External;
        }
      }
    });
  });
}

void classify_cells_direct(Grid& grid, const TriangleMesh& mesh, const std::vector<std::size_t>& order) {
  std::vector<std::size_t> all;
  if (order.empty()) {
    all.resize(grid.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
  }
  const bool closed = validate_watertight(mesh).is_watertight;
  for (std::size_t i : order.empty() ? all : order) {
    Cell& cell = grid.cells[i];
    const ClipResult r = clip_to_box(mesh, grid.cell_box(cell.coord), ClipMode::SurfaceOnly);
    cell.clipped_surface_vertex_count = r.surface_vertex_count;
    const Vec3 c = grid.cell_center(cell.coord);
    if (r.surface_vertex_count > 0) cell.classification = CellClass::Boundary;
    else if (closed ? point_in_mesh(mesh, c) : point_in_mesh_majority(mesh, c)) cell.classification = CellClass::Internal;
    else cell.classification = CellClass::External;
  }
}

void write_voxel_csv(const Grid& grid, std::ostream& out) {
  out << "x,y,z,class,owner\n";
  for (const Cell& c : grid.cells) {
    out << c.coord[0] << ',' << c.coord[1] << ',' << c.coord[2] << ',' << to_string(c.classification) << ','
        << c.owner << '\n';
  }
}

}  // namespace parallelobox
