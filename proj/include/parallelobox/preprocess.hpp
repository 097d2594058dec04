#pragma once

#include <array>
#include <vector>

#include "parallelobox/clip.hpp"
#include "parallelobox/mesh.hpp"

namespace parallelobox {

inline constexpr double kDefaultSymmetryThreshold = 0.01;

struct SymmetryPlane {
  Vec3 normal = Vec3::UnitX();
  double offset = 0.0;
  double error_score = 0.0;  // mean reflected-vertex mismatch / principal_diagonal

  Plane plane() const { return {normal, offset}; }
};

/// x' = rotation * x + translation
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Pose inverse() const { return {rotation.transpose(), -(rotation.transpose() * translation)}; }
};

/// Principal axes of the vertex cloud; columns of `axes` ordered by
/// decreasing variance. Nearly diagonal covariances snap to the coordinate
/// axes so that axis-aligned inputs stay exactly axis-aligned.
struct PrincipalAxes {
  Vec3 mean = Vec3::Zero();
  Mat3 axes = Mat3::Identity();
  Vec3 variances = Vec3::Zero();
};

PrincipalAxes principal_axes(const TriangleMesh& mesh);

/// Diagonal of the bounding box taken in the principal-axis frame; unlike
/// the axis-aligned diagonal it does not change when the mesh is rotated.
double principal_diagonal(const TriangleMesh& mesh);

/// Mean distance from each reflected vertex to its nearest original vertex,
/// divided by principal_diagonal.
double symmetry_error(const TriangleMesh& mesh, const Plane& plane);

/// Scores the three principal planes, each at offsets of 0, -5%, +5%, -10%
/// and +10% of the extent around the vertex mean, and returns the best.
SymmetryPlane find_best_symmetry_plane(const TriangleMesh& mesh);

struct SymmetryCut {
  std::vector<TaggedMesh> parts;  // one (unchanged) or two halves; caps tagged
  SymmetryPlane plane;
  bool cut = false;
};

/// Cuts at the best plane when its error is at most `threshold`.
SymmetryCut maybe_symmetry_cut(const TriangleMesh& mesh, double threshold);

/// Area of faces whose unit normal n satisfies n . (-up) > sin(tolerance).
double overhang_area(const TriangleMesh& mesh, const Vec3& up, double tolerance_deg);

/// The 24 proper rotations that map coordinate axes onto coordinate axes;
/// index 0 is the identity.
const std::array<Mat3, 24>& axis_rotations();

struct Oriented {
  TriangleMesh mesh;
  Pose pose;  // maps input coordinates to `mesh` coordinates
  int rotation_index = 0;
};

/**
 * Centers the vertex mean on the origin, aligns the principal axes with
 * X, Y, Z, then picks the axis rotation with the least overhang area for
 * build direction +Z. Ties prefer the symmetry normal along X, then the
 * lowest height, then the rotation closest to the identity.
 */
Oriented optimize_orientation(const TriangleMesh& mesh, const SymmetryPlane& symmetry, double overhang_tolerance_deg);

}  // namespace parallelobox
