#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "parallelobox/clip.hpp"
#include "parallelobox/grid.hpp"

using namespace parallelobox;

namespace {

Grid classified(const TriangleMesh& m, Granularity g = Granularity::VeryFine) {
  Grid grid = build_grid(m, g);
  classify_cells(grid, m);
  return grid;
}

// Separating-axis triangle/box overlap (independent of the clip kernel).
bool triangle_box_overlap(const Vec3& a, const Vec3& b, const Vec3& c, const Aabb& box) {
  const Vec3 center = box.center(), half = 0.5 * box.extent();
  const Vec3 v[3] = {a - center, b - center, c - center};
  const Vec3 e[3] = {v[1] - v[0], v[2] - v[1], v[0] - v[2]};
  auto separated = [&](const Vec3& axis) {
    if (axis.squaredNorm() < 1e-24) return false;
    double lo = v[0].dot(axis), hi = lo;
    for (int i = 1; i < 3; ++i) {
      lo = std::min(lo, v[i].dot(axis));
      hi = std::max(hi, v[i].dot(axis));
    }
    const double r = half.cwiseProduct(axis.cwiseAbs()).sum();
    return lo > r || hi < -r;
  };
  for (int k = 0; k < 3; ++k) {
    if (separated(Vec3::Unit(k))) return false;
  }
  if (separated(e[0].cross(e[1]))) return false;
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 3; ++j) {
      if (separated(Vec3::Unit(k).cross(e[j]))) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("granularity presets") {
  CHECK(cells_along_longest_axis(Granularity::Coarse) == 8);
  CHECK(cells_along_longest_axis(Granularity::Medium) == 10);
  CHECK(cells_along_longest_axis(Granularity::Fine) == 12);
  CHECK(cells_along_longest_axis(Granularity::VeryFine) == 15);
  CHECK(parse_granularity("very_fine") == Granularity::VeryFine);
  CHECK(to_string(Granularity::Coarse) == "coarse");
  CHECK_THROWS(parse_granularity("ultra"));
}

TEST_CASE("grid dimensions") {
  const Grid cube = build_grid(fixtures::unit_cube(), Granularity::VeryFine);
  CHECK(cube.dims == Coord{15, 15, 15});
  CHECK(cube.size() == 3375);

  const Grid slab = build_grid(fixtures::box({0, 0, 0}, {30, 10, 10}), Granularity::VeryFine);
  CHECK(slab.dims == Coord{15, 5, 5});
  CHECK(slab.cell_size == doctest::Approx(30.03 / 15));

  for (const TriangleMesh& m : {fixtures::dumbbell(), fixtures::l_bracket(), fixtures::asymmetric_blob()}) {
    const Grid g = build_grid(m, Granularity::Coarse);
    CHECK(*std::max_element(g.dims.begin(), g.dims.end()) == 8);
    const Aabb scaled = aabb_of(m).scaled(1.001);
    const Aabb covered = g.box_of({0, 0, 0}, {g.dims[0] - 1, g.dims[1] - 1, g.dims[2] - 1});
    for (int k = 0; k < 3; ++k) {
      CHECK(covered.min[k] <= scaled.min[k] + 1e-9);
      CHECK(covered.max[k] >= scaled.max[k] - 1e-9);
    }
  }
}

TEST_CASE("sphere classification against analytic radii") {
  const TriangleMesh s = fixtures::sphere();
  const Grid g = classified(s);
  // Inradius of the polyhedron: smallest face-plane distance from the center.
  double r_in = 10.0;
  for (std::size_t t = 0; t < s.triangle_count(); ++t) r_in = std::min(r_in, s.face_cross(t).normalized().dot(s.corner(t, 0)));
  int checked = 0;
  for (const Cell& c : g.cells) {
    const Aabb b = g.cell_box(c.coord);
    const Vec3 nearest = Vec3::Zero().cwiseMax(b.min).cwiseMin(b.max);
    double far = 0.0;
    for (int i = 0; i < 8; ++i) far = std::max(far, Vec3(i & 1 ? b.max.x() : b.min.x(), i & 2 ? b.max.y() : b.min.y(), i & 4 ? b.max.z() : b.min.z()).norm());
    if (far < r_in - 1e-9) {
      CHECK(c.classification == CellClass::Internal);
      ++checked;
    } else if (nearest.norm() > 10.0 + 1e-9) {
      CHECK(c.classification == CellClass::External);
      ++checked;
    } else if (nearest.norm() < r_in - 1e-9 && far > 10.0 + 1e-9) {
      CHECK(c.classification == CellClass::Boundary);
      ++checked;
    }
  }
  CHECK(checked > 3000);
  CHECK(g.at({7, 7, 7}).classification == CellClass::Internal);
  CHECK(g.at({0, 0, 0}).classification == CellClass::External);
  CHECK(g.at({14, 14, 14}).classification == CellClass::External);
}

TEST_CASE("thin plate has no internal cells") {
  const TriangleMesh plate = fixtures::box({0, 0, 0}, {50, 40, 1});
  const Grid g = classified(plate);
  CHECK(g.count(CellClass::Internal) == 0);
  CHECK(g.count(CellClass::Boundary) > 0);
}

TEST_CASE("classification invariants") {
  for (const TriangleMesh& m : {fixtures::sphere(), fixtures::dumbbell(), fixtures::l_bracket(), fixtures::hollow_box(),
                                fixtures::asymmetric_blob(), fixtures::unit_cube()}) {
    const Grid g = classified(m);
    CHECK(g.count(CellClass::Boundary) + g.count(CellClass::Internal) + g.count(CellClass::External) == g.size());
    for (const Cell& c : g.cells) {
      CHECK(c.owner == kNoOwner);
      if (c.classification == CellClass::External) CHECK(c.measures.volume == 0.0);
    }

    // Every triangle meets a boundary cell.
    bool all_covered = true;
    for (std::size_t t = 0; t < m.triangle_count() && all_covered; ++t) {
      Aabb tb{m.corner(t, 0), m.corner(t, 0)};
      for (int k = 1; k < 3; ++k) {
        tb.min = tb.min.cwiseMin(m.corner(t, k));
        tb.max = tb.max.cwiseMax(m.corner(t, k));
      }
      Coord lo, hi;
      for (int k = 0; k < 3; ++k) {
        lo[k] = std::clamp(static_cast<int>(std::floor((tb.min[k] - g.origin[k]) / g.cell_size)) - 1, 0, g.dims[k] - 1);
        hi[k] = std::clamp(static_cast<int>(std::floor((tb.max[k] - g.origin[k]) / g.cell_size)) + 1, 0, g.dims[k] - 1);
      }
      bool hit = false;
      for (int z = lo[2]; z <= hi[2] && !hit; ++z) {
        for (int y = lo[1]; y <= hi[1] && !hit; ++y) {
          for (int x = lo[0]; x <= hi[0] && !hit; ++x) {
            hit = g.at({x, y, z}).classification == CellClass::Boundary &&
                  triangle_box_overlap(m.corner(t, 0), m.corner(t, 1), m.corner(t, 2), g.cell_box({x, y, z}));
          }
        }
      }
      all_covered = hit;
    }
    CHECK(all_covered);

    // Cell measures partition the solid.
    CellMeasures total;
    for (const Cell& c : g.cells) total += c.measures;
    const auto ref = measure(m);
    CHECK(std::abs(total.volume - ref.volume) <= 1e-9 * ref.volume);
    CHECK(std::abs(total.surface_area - ref.surface_area) <= 1e-9 * ref.surface_area);
  }
}

TEST_CASE("hierarchical and direct classification agree in any order") {
  std::mt19937_64 rng(8);
  for (const TriangleMesh& m : {fixtures::sphere(), fixtures::dumbbell(), fixtures::hollow_box(), fixtures::asymmetric_blob()}) {
    const Grid fast = classified(m);
    Grid direct = build_grid(m, Granularity::VeryFine);
    std::vector<std::size_t> order(direct.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    classify_cells_direct(direct, m, order);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < fast.size(); ++i) mismatches += fast.cells[i].classification != direct.cells[i].classification;
    CHECK(mismatches == 0);
  }
}

TEST_CASE("internal cells of convex solids are 6-connected") {
  for (const TriangleMesh& m : {fixtures::sphere(), fixtures::box({0, 0, 0}, {20, 20, 20})}) {
    const Grid g = classified(m);
    std::vector<char> seen(g.size(), 0);
    std::size_t start = g.size();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.cells[i].classification == CellClass::Internal) {
        start = i;
        break;
      }
    }
    REQUIRE(start < g.size());
    std::queue<Coord> q;
    q.push(g.cells[start].coord);
    seen[start] = 1;
    std::size_t reached = 0;
    while (!q.empty()) {
      const Coord c = q.front();
      q.pop();
      ++reached;
      for (Direction d : kDirections) {
        Coord n = c;
        n[axis_of(d)] += is_positive(d) ? 1 : -1;
        if (!g.in_bounds(n) || seen[g.index(n)] || g.at(n).classification != CellClass::Internal) continue;
        seen[g.index(n)] = 1;
        q.push(n);
      }
    }
    CHECK(reached == g.count(CellClass::Internal));
  }
}

TEST_CASE("open meshes still classify") {
  TriangleMesh open = fixtures::box({0, 0, 0}, {20, 20, 20});
  open.triangles.pop_back();
  Grid g = build_grid(open, Granularity::Coarse);
  classify_cells(g, open);
  CHECK(g.count(CellClass::Internal) > 0);
  CHECK(g.count(CellClass::Boundary) > 0);
}

TEST_CASE("voxel csv dump") {
  const Grid g = classified(fixtures::unit_cube(), Granularity::Coarse);
  std::ostringstream out;
  write_voxel_csv(g, out);
  const std::string text = out.str();
  CHECK(text.rfind("x,y,z,class,owner\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == g.size() + 1);
}

TEST_CASE("cell measures match a capped clip of each cell") {
  for (const TriangleMesh& m : {fixtures::dumbbell(), fixtures::asymmetric_blob(), fixtures::hollow_box()}) {
    const Grid g = classified(m, Granularity::Coarse);
    for (const Cell& c : g.cells) {
      if (c.classification != CellClass::Boundary) continue;
      const auto r = clip_to_box(m, g.cell_box(c.coord), ClipMode::Volumetric);
      const double v = r.mesh.empty() ? 0.0 : measure(r.mesh).volume;
      CHECK(c.measures.volume == doctest::Approx(v).epsilon(1e-9).scale(std::pow(g.cell_size, 3)));
      CHECK(c.measures.surface_area == doctest::Approx(r.cap_free_area()).epsilon(1e-9).scale(g.cell_size * g.cell_size));
      CHECK(c.clipped_surface_vertex_count == r.surface_vertex_count);
    }
  }
}
