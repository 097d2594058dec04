#pragma once

#include <cstdint>
#include <vector>

#include "parallelobox/mesh.hpp"

namespace parallelobox {

/// Vertices within this distance of a cutting plane are snapped onto it (mm).
inline constexpr double kPlaneSnap = 1e-9;

/// The set n.p = offset; the positive side is n.p - offset >= 0.
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;

  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
  static Plane axis(int k, double coordinate) { return {Vec3::Unit(k), coordinate}; }
};

/// A mesh whose triangles remember whether they were synthesized as caps.
struct TaggedMesh {
  TriangleMesh mesh;
  std::vector<std::uint8_t> cap;  // one flag per triangle

  static TaggedMesh from(TriangleMesh m) {
    TaggedMesh t{std::move(m), {}};
    t.cap.assign(t.mesh.triangles.size(), 0);
    return t;
  }
  bool empty() const { return mesh.triangles.empty(); }
  double cap_free_area() const;
  std::size_t surface_vertex_count() const;
};

enum class Side { Positive, Negative, Both };

struct SplitResult {
  TaggedMesh positive;
  TaggedMesh negative;
};

/**
 * Splits a mesh by a plane. Triangles lying in the plane go to the side the
 * solid occupies (the side their normal points away from). With
 * `close_cuts`, every side is closed with planar caps built from its
 * unmatched on-plane edges, so watertight input gives watertight halves.
 * Only the requested side(s) are materialized.
 */
SplitResult split_by_plane(const TaggedMesh& input, const Plane& plane, bool close_cuts, Side want = Side::Both);

enum class ClipMode { SurfaceOnly, Volumetric };

struct ClipResult {
  TriangleMesh mesh;
  std::size_t surface_vertex_count = 0;  // vertices of non-cap faces
  bool capped = false;
  std::vector<std::uint8_t> cap_faces;  // per triangle of `mesh`

  double cap_free_area() const;
};

/// Intersects a mesh with an axis-aligned box by six successive half-space
/// clips. Throws DegenerateBox, or NonWatertightInput in volumetric mode.
ClipResult clip_to_box(const TriangleMesh& mesh, const Aabb& box, ClipMode mode);

/// Same as clip_to_box but keeps the cap tags and skips input validation.
TaggedMesh clip_tagged(const TaggedMesh& mesh, const Aabb& box, bool close_cuts);

struct PlaneCut {
  TriangleMesh positive_half;
  TriangleMesh negative_half;
};

/// Splits a watertight mesh into two capped, watertight halves.
PlaneCut cut_by_plane(const TriangleMesh& mesh, const Plane& plane);

/// Ray-parity containment test for watertight meshes. Rays that graze an
/// edge or vertex are re-cast along another direction.
bool point_in_mesh(const TriangleMesh& mesh, const Vec3& p);

/// Majority vote of three independent parity rays; tolerates small holes.
bool point_in_mesh_majority(const TriangleMesh& mesh, const Vec3& p);

}  // namespace parallelobox
