#include "parallelobox/clip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "parallelobox/errors.hpp"
#include "parallelobox/triangulate.hpp"

namespace parallelobox {

namespace {

std::uint64_t edge_key(std::int32_t a, std::int32_t b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

int exact_axis(const Vec3& n) {
  for (int k = 0; k < 3; ++k) {
    if (n[(k + 1) % 3] == 0.0 && n[(k + 2) % 3] == 0.0 && std::abs(n[k]) == 1.0) return k;
  }
  return -1;
}

// In-plane basis (u, v) with u x v = n; exact for axis-aligned normals.
std::pair<Vec3, Vec3> plane_basis(const Vec3& n) {
  Vec3 u;
  const int axis = exact_axis(n);
  if (axis >= 0) {
    static const int kU[3][2] = {{1, 2}, {2, 0}, {0, 1}};  // [axis][sign<0]
    u = Vec3::Unit(kU[axis][n[axis] < 0 ? 1 : 0]);
  } else {
    int helper = 0;
    for (int k = 1; k < 3; ++k) {
      if (std::abs(n[k]) < std::abs(n[helper])) helper = k;
    }
    u = Vec3::Unit(helper).cross(n).normalized();
  }
  return {u, n.cross(u)};
}

struct SideBuilder {
  std::vector<Triangle> tris;
  std::vector<std::uint8_t> cap;
};

// Chains directed on-plane edges into closed rings. At a vertex with several
// outgoing edges the sharpest left turn is taken, which keeps rings that
// touch at a single vertex apart.
std::vector<std::vector<std::int32_t>> chain_rings(const std::vector<std::pair<std::int32_t, std::int32_t>>& edges,
                                                   const std::unordered_map<std::int32_t, Vec2>& coords) {
  std::unordered_map<std::int32_t, std::vector<std::size_t>> outgoing;
  for (std::size_t e = 0; e < edges.size(); ++e) outgoing[edges[e].first].push_back(e);
  std::vector<bool> used(edges.size(), false);
  std::vector<std::vector<std::int32_t>> rings;

  for (std::size_t start = 0; start < edges.size(); ++start) {
    if (used[start]) continue;
    std::vector<std::int32_t> ring{edges[start].first};
    std::size_t cur = start;
    bool closed = false;
    for (std::size_t guard = 0; guard <= edges.size(); ++guard) {
      used[cur] = true;
      const std::int32_t from = edges[cur].first;
      const std::int32_t to = edges[cur].second;
      if (to == edges[start].first) {
        closed = true;
        break;
      }
      ring.push_back(to);
      const auto it = outgoing.find(to);
      if (it == outgoing.end()) break;
      const Vec2 din = coords.at(to) - coords.at(from);
      std::size_t next = edges.size();
      double best_turn = -10.0;
      for (std::size_t cand : it->second) {
        if (used[cand]) continue;
        const Vec2 dout = coords.at(edges[cand].second) - coords.at(to);
        const double turn = std::atan2(din.x() * dout.y() - din.y() * dout.x(), din.dot(dout));
        if (next == edges.size() || turn > best_turn) {
          best_turn = turn;
          next = cand;
        }
      }
      if (next == edges.size()) break;
      cur = next;
    }
    if (closed && ring.size() >= 3) rings.push_back(std::move(ring));
  }
  return rings;
}

// Closes the open boundary of one side with planar caps. `cap_normal` is the
// outward normal the caps must have.
void close_side(SideBuilder& side, const std::vector<Vec3>& verts, const std::vector<std::uint8_t>& on_plane,
                const Vec3& cap_normal) {
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(side.tris.size() * 3);
  for (const Triangle& t : side.tris) {
    for (int k = 0; k < 3; ++k) ++directed[edge_key(t[k], t[(k + 1) % 3])];
  }
  std::vector<std::pair<std::int32_t, std::int32_t>> cap_edges;
  for (const auto& [key, count] : directed) {
    const auto a = static_cast<std::int32_t>(key >> 32);
    const auto b = static_cast<std::int32_t>(key & 0xffffffffu);
    if (!on_plane[a] || !on_plane[b]) continue;
    const auto rev = directed.find(edge_key(b, a));
    const int excess = count - (rev == directed.end() ? 0 : rev->second);
    for (int i = 0; i < excess; ++i) cap_edges.emplace_back(b, a);
  }
  if (cap_edges.empty()) return;
  // Hash-map iteration order is not portable; sort for reproducible caps.
  std::sort(cap_edges.begin(), cap_edges.end());

  const auto [u, v] = plane_basis(cap_normal);
  std::unordered_map<std::int32_t, Vec2> coords;
  for (const auto& [a, b] : cap_edges) {
    for (std::int32_t id : {a, b}) {
      if (!coords.count(id)) coords.emplace(id, Vec2(verts[id].dot(u), verts[id].dot(v)));
    }
  }
  std::vector<Ring> rings;
  for (auto& ids : chain_rings(cap_edges, coords)) {
    Ring ring;
    ring.pts.reserve(ids.size());
    for (std::int32_t id : ids) ring.pts.push_back(coords.at(id));
    ring.ids = std::move(ids);
    rings.push_back(std::move(ring));
  }
  for (const auto& tri : triangulate_rings(rings)) {
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
    side.tris.push_back({tri[0], tri[1], tri[2]});
    side.cap.push_back(1);
  }
}

TaggedMesh compact(const SideBuilder& side, const std::vector<Vec3>& verts, const std::string& name) {
  TaggedMesh out;
  out.mesh.name = name;
  std::unordered_map<std::int32_t, std::int32_t> remap;
  out.mesh.triangles.reserve(side.tris.size());
  for (const Triangle& t : side.tris) {
    Triangle mapped;
    for (int k = 0; k < 3; ++k) {
      auto [it, inserted] = remap.try_emplace(t[k], static_cast<std::int32_t>(out.mesh.vertices.size()));
      if (inserted) out.mesh.vertices.push_back(verts[t[k]]);
      mapped[k] = it->second;
    }
    out.mesh.triangles.push_back(mapped);
  }
  out.cap = side.cap;
  return out;
}

}  // namespace

double TaggedMesh::cap_free_area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (!cap[t]) sum += mesh.face_area(t);
  }
  return sum;
}

std::size_t TaggedMesh::surface_vertex_count() const {
  std::vector<bool> seen(mesh.vertices.size(), false);
  std::size_t count = 0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (cap[t]) continue;
    for (std::int32_t i : mesh.triangles[t]) {
      if (!seen[i]) {
        seen[i] = true;
        ++count;
      }
    }
  }
  return count;
}

double ClipResult::cap_free_area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (!cap_faces[t]) sum += mesh.face_area(t);
  }
  return sum;
}

SplitResult split_by_plane(const TaggedMesh& input, const Plane& plane, bool close_cuts, Side want) {
  const TriangleMesh& mesh = input.mesh;
  const bool want_pos = want != Side::Negative;
  const bool want_neg = want != Side::Positive;

  const int axis = exact_axis(plane.normal);
  std::vector<Vec3> verts = mesh.vertices;
  std::vector<double> dist(verts.size());
  std::vector<std::uint8_t> on_plane(verts.size(), 0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    double d = plane.signed_distance(verts[i]);
    if (std::abs(d) < kPlaneSnap) {
      d = 0.0;
      on_plane[i] = 1;
      if (axis >= 0) verts[i][axis] = plane.normal[axis] * plane.offset;
    }
    dist[i] = d;
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }

  SplitResult result;
  // Entirely on one side: nothing to cut or cap.
  if (lo > 0.0 || verts.empty()) {
    if (want_pos) result.positive = input;
    return result;
  }
  if (hi < 0.0) {
    if (want_neg) result.negative = input;
    return result;
  }

  std::unordered_map<std::uint64_t, std::int32_t> crossings;
  auto crossing = [&](std::int32_t a, std::int32_t b) {
    if (a > b) std::swap(a, b);
    auto [it, inserted] = crossings.try_emplace(edge_key(a, b), 0);
    if (inserted) {
      const double t = dist[a] / (dist[a] - dist[b]);
      Vec3 p = verts[a] + t * (verts[b] - verts[a]);
      if (axis >= 0) p[axis] = plane.normal[axis] * plane.offset;
      it->second = static_cast<std::int32_t>(verts.size());
      verts.push_back(p);
      dist.push_back(0.0);
      on_plane.push_back(1);
    }
    return it->second;
  };

  SideBuilder pos, neg;
  auto emit = [](SideBuilder& side, const std::vector<std::int32_t>& poly, std::uint8_t cap) {
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
      side.tris.push_back({poly[0], poly[i], poly[i + 1]});
      side.cap.push_back(cap);
    }
  };

  std::vector<std::int32_t> pos_poly, neg_poly;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    const std::uint8_t cap = input.cap.empty() ? 0 : input.cap[t];
    int n_pos = 0, n_neg = 0;
    for (std::int32_t i : tri) {
      if (dist[i] > 0) ++n_pos;
      else if (dist[i] < 0) ++n_neg;
    }
    if (n_neg == 0 && n_pos == 0) {
      // In the plane: belongs to the side the solid is on.
      const bool solid_below = mesh.face_cross(t).dot(plane.normal) > 0;
      SideBuilder& side = solid_below ? neg : pos;
      if (solid_below ? want_neg : want_pos) {
        side.tris.push_back(tri);
        side.cap.push_back(cap);
      }
      continue;
    }
    if (n_neg == 0) {
      if (want_pos) {
        pos.tris.push_back(tri);
        pos.cap.push_back(cap);
      }
      continue;
    }
    if (n_pos == 0) {
      if (want_neg) {
        neg.tris.push_back(tri);
        neg.cap.push_back(cap);
      }
      continue;
    }
    pos_poly.clear();
    neg_poly.clear();
    for (int k = 0; k < 3; ++k) {
      const std::int32_t a = tri[k];
      const std::int32_t b = tri[(k + 1) % 3];
      if (dist[a] >= 0) pos_poly.push_back(a);
      if (dist[a] <= 0) neg_poly.push_back(a);
      if ((dist[a] > 0 && dist[b] < 0) || (dist[a] < 0 && dist[b] > 0)) {
        const std::int32_t x = crossing(a, b);
        pos_poly.push_back(x);
        neg_poly.push_back(x);
      }
    }
    if (want_pos) emit(pos, pos_poly, cap);
    if (want_neg) emit(neg, neg_poly, cap);
  }

  if (close_cuts) {
    if (want_pos) close_side(pos, verts, on_plane, -plane.normal);
    if (want_neg) close_side(neg, verts, on_plane, plane.normal);
  }
  if (want_pos) result.positive = compact(pos, verts, mesh.name);
  if (want_neg) result.negative = compact(neg, verts, mesh.name);
  return result;
}

TaggedMesh clip_tagged(const TaggedMesh& mesh, const Aabb& box, bool close_cuts) {
  TaggedMesh current = mesh;
  for (int k = 0; k < 3 && !current.empty(); ++k) {
    current = split_by_plane(current, Plane::axis(k, box.min[k]), close_cuts, Side::Positive).positive;
    if (current.empty()) break;
    current = split_by_plane(current, Plane::axis(k, box.max[k]), close_cuts, Side::Negative).negative;
  }
  return current;
}

ClipResult clip_to_box(const TriangleMesh& mesh, const Aabb& box, ClipMode mode) {
  if (!((box.max - box.min).array() > 0).all()) throw DegenerateBox();
  const bool volumetric = mode == ClipMode::Volumetric;
  if (volumetric && !validate_watertight(mesh).is_watertight) throw NonWatertightInput();

  TaggedMesh clipped = clip_tagged(TaggedMesh::from(mesh), box, volumetric);
  ClipResult result;
  result.surface_vertex_count = clipped.surface_vertex_count();
  result.capped = std::any_of(clipped.cap.begin(), clipped.cap.end(), [](std::uint8_t c) { return c != 0; });
  result.mesh = std::move(clipped.mesh);
  result.cap_faces = std::move(clipped.cap);
  return result;
}

PlaneCut cut_by_plane(const TriangleMesh& mesh, const Plane& plane) {
  if (!validate_watertight(mesh).is_watertight) throw NonWatertightInput();
  SplitResult split = split_by_plane(TaggedMesh::from(mesh), plane, true, Side::Both);
  return {std::move(split.positive.mesh), std::move(split.negative.mesh)};
}

namespace {

enum class RayHit { Miss, Hit, Ambiguous };

RayHit intersect(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b, const Vec3& c) {
  constexpr double kBary = 1e-9;
  constexpr double kOnSurface = 1e-9;
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 pvec = dir.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) < 1e-14 * e1.norm() * e2.norm()) return RayHit::Miss;  // parallel
  const double inv = 1.0 / det;
  const Vec3 tvec = origin - a;
  const double u = tvec.dot(pvec) * inv;
  if (u < -kBary || u > 1.0 + kBary) return RayHit::Miss;
  const Vec3 qvec = tvec.cross(e1);
  const double v = dir.dot(qvec) * inv;
  if (v < -kBary || u + v > 1.0 + kBary) return RayHit::Miss;
  const double t = e2.dot(qvec) * inv;
  if (t < -kOnSurface) return RayHit::Miss;
  if (t <= kOnSurface) return RayHit::Ambiguous;
  if (u < kBary || v < kBary || u + v > 1.0 - kBary) return RayHit::Ambiguous;
  return RayHit::Hit;
}

// Returns -1 when the ray grazes an edge or starts on the surface.
int parity(const TriangleMesh& mesh, const Vec3& p, const Vec3& dir) {
  int crossings = 0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    switch (intersect(p, dir, mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2))) {
      case RayHit::Hit: ++crossings; break;
      case RayHit::Ambiguous: return -1;
      case RayHit::Miss: break;
    }
  }
  return crossings & 1;
}

const std::array<Vec3, 6>& ray_directions() {
  static const std::array<Vec3, 6> dirs = {
      Vec3(0.8017837, 0.5345225, 0.2672612).normalized(), Vec3(-0.3015113, 0.9045340, -0.3015113).normalized(),
      Vec3(0.1825742, -0.3651484, 0.9128709).normalized(), Vec3(-0.6859943, -0.5144957, 0.5144957).normalized(),
      Vec3(0.4364358, -0.8728716, -0.2182179).normalized(), Vec3(-0.2390457, 0.3585686, -0.9021342).normalized()};
  return dirs;
}

}  // namespace

bool point_in_mesh(const TriangleMesh& mesh, const Vec3& p) {
  if (mesh.triangles.empty() || !aabb_of(mesh).contains(p)) return false;
  for (const Vec3& dir : ray_directions()) {
    const int result = parity(mesh, p, dir);
    if (result >= 0) return result == 1;
  }
  // On the surface along every direction: nudge the query and retry.
  const Vec3 nudged = p + 1e-7 * ray_directions()[0];
  for (const Vec3& dir : ray_directions()) {
    const int result = parity(mesh, nudged, dir);
    if (result >= 0) return result == 1;
  }
  return false;
}

bool point_in_mesh_majority(const TriangleMesh& mesh, const Vec3& p) {
  if (mesh.triangles.empty() || !aabb_of(mesh).contains(p)) return false;
  int votes = 0, cast = 0;
  for (const Vec3& dir : ray_directions()) {
    const int result = parity(mesh, p, dir);
    if (result < 0) continue;
    votes += result;
    if (++cast == 3) break;
  }
  return cast > 0 && 2 * votes > cast;
}

}  // namespace parallelobox
