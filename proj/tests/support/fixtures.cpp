#include "fixtures.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "parallelobox/clip.hpp"

namespace fixtures {

using parallelobox::Triangle;

TriangleMesh box(const Vec3& lo, const Vec3& hi, const std::string& name) {
  TriangleMesh m;
  m.name = name;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(), (i & 4) ? hi.z() : lo.z());
  }
  // Quads wound counterclockwise seen from outside.
  const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& q : quads) {
    m.triangles.push_back({q[0], q[1], q[2]});
    m.triangles.push_back({q[0], q[2], q[3]});
  }
  return m;
}

TriangleMesh unit_cube() { return box(Vec3::Zero(), Vec3::Ones(), "unit_cube"); }

TriangleMesh icosphere(double radius, int subdivisions, const Vec3& center) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : v) p.normalize();
  std::vector<Triangle> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((0.5 * (v[a] + v[b])).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<Triangle> next;
    for (const Triangle& tri : f) {
      const int ab = midpoint(tri[0], tri[1]), bc = midpoint(tri[1], tri[2]), ca = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  TriangleMesh m;
  m.name = "sphere";
  for (const Vec3& p : v) m.vertices.push_back(center + radius * p);
  m.triangles = std::move(f);
  return m;
}

TriangleMesh sphere() { return icosphere(10.0, 3); }

TriangleMesh voxels(const std::vector<std::array<int, 3>>& cells, double size, const std::string& name) {
  const std::set<std::array<int, 3>> occupied(cells.begin(), cells.end());
  TriangleMesh m;
  m.name = name;
  std::map<std::array<int, 3>, int> index;
  auto vertex = [&](int x, int y, int z) {
    const std::array<int, 3> key{x, y, z};
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(m.vertices.size());
    m.vertices.emplace_back(size * x, size * y, size * z);
    index.emplace(key, id);
    return id;
  };
  for (const auto& c : occupied) {
    for (int axis = 0; axis < 3; ++axis) {
      for (int dir : {-1, 1}) {
        auto n = c;
        n[axis] += dir;
        if (occupied.count(n)) continue;
        // Face corners in the plane of the face, wound so the normal points
        // along dir * axis.
        const int u = (axis + 1) % 3, w = (axis + 2) % 3;
        std::array<int, 3> base = c;
        if (dir > 0) base[axis] += 1;
        std::array<std::array<int, 3>, 4> q;
        for (int k = 0; k < 4; ++k) {
          q[k] = base;
          q[k][u] += (k == 1 || k == 2) ? 1 : 0;
          q[k][w] += (k >= 2) ? 1 : 0;
        }
        int id[4];
        for (int k = 0; k < 4; ++k) id[k] = vertex(q[k][0], q[k][1], q[k][2]);
        if (dir > 0) {
          m.triangles.push_back({id[0], id[1], id[2]});
          m.triangles.push_back({id[0], id[2], id[3]});
        } else {
          m.triangles.push_back({id[0], id[2], id[1]});
          m.triangles.push_back({id[0], id[3], id[2]});
        }
      }
    }
  }
  return m;
}

TriangleMesh dumbbell() {
  std::vector<std::array<int, 3>> cells;
  for (int x = 0; x < 14; ++x) {
    for (int y = 0; y < 4; ++y) {
      for (int z = 0; z < 4; ++z) {
        const bool lobe = x < 4 || x >= 10;
        const bool bar = y >= 1 && y < 3 && z >= 1 && z < 3;
        if (lobe || bar) cells.push_back({x, y, z});
      }
    }
  }
  return voxels(cells, 5.0, "dumbbell");
}

TriangleMesh l_bracket() {
  std::vector<std::array<int, 3>> cells;
  for (int x = 0; x < 8; ++x) {
    for (int y = 0; y < 6; ++y) {
      for (int z = 0; z < 3; ++z) {
        if (y < 2 || x < 2) cells.push_back({x, y, z});
      }
    }
  }
  return voxels(cells, 5.0, "l_bracket");
}

TriangleMesh hollow_box() {
  std::vector<std::array<int, 3>> cells;
  for (int x = 0; x < 6; ++x) {
    for (int y = 0; y < 6; ++y) {
      for (int z = 0; z < 4; ++z) {
        if (z == 0 || x == 0 || x == 5 || y == 0 || y == 5) cells.push_back({x, y, z});
      }
    }
  }
  return voxels(cells, 5.0, "hollow_box");
}

TriangleMesh wedge() {
  TriangleMesh m;
  m.name = "wedge";
  // Cross-section in XZ: (0,0), (10,0), (0,10); extruded along y.
  m.vertices = {{0, 0, 0}, {10, 0, 0}, {0, 0, 10}, {0, 10, 0}, {10, 10, 0}, {0, 10, 10}};
  m.triangles = {{0, 2, 1}, {3, 4, 5}, {0, 1, 4}, {0, 4, 3}, {0, 3, 5}, {0, 5, 2}, {1, 2, 5}, {1, 5, 4}};
  // Convex, so orient every face away from the centroid.
  const Vec3 c = parallelobox::vertex_centroid(m);
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    if (m.face_cross(t).dot(m.corner(t, 0) - c) < 0) std::swap(m.triangles[t][1], m.triangles[t][2]);
  }
  return m;
}

TriangleMesh asymmetric_blob() {
  TriangleMesh m = icosphere(1.0, 3);
  m.name = "blob";
  for (Vec3& p : m.vertices) {
    const double r = 10.0 * (1.0 + 0.35 * p.x() + 0.2 * p.y() * p.z() + 0.25 * p.x() * p.y() + 0.15 * p.z() * p.z() * p.x());
    p *= r;
  }
  return m;
}

TriangleMesh hemisphere() {
  auto cut = parallelobox::cut_by_plane(sphere(), parallelobox::Plane::axis(2, 0.0));
  cut.positive_half.name = "hemisphere";
  return cut.positive_half;
}

std::string ascii_stl(const TriangleMesh& mesh) {
  std::ostringstream out;
  out.precision(17);
  out << "solid " << mesh.name << "\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vec3 n = mesh.face_cross(t).normalized();
    out << " facet normal " << n.x() << ' ' << n.y() << ' ' << n.z() << "\n  outer loop\n";
    for (int k = 0; k < 3; ++k) {
      const Vec3& p = mesh.corner(t, k);
      out << "   vertex " << p.x() << ' ' << p.y() << ' ' << p.z() << "\n";
    }
    out << "  endloop\n endfacet\n";
  }
  out << "endsolid " << mesh.name << "\n";
  return out.str();
}

}  // namespace fixtures
