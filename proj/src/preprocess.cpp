#include "parallelobox/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "parallelobox/errors.hpp"

namespace parallelobox {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace {

using BgPoint = bg::model::point<double, 3, bg::cs::cartesian>;
using VertexTree = bgi::rtree<BgPoint, bgi::quadratic<16>>;

BgPoint to_bg(const Vec3& p) { return BgPoint(p.x(), p.y(), p.z()); }

class NearestVertex {
 public:
  explicit NearestVertex(const std::vector<Vec3>& vertices) {
    std::vector<BgPoint> pts;
    pts.reserve(vertices.size());
    for (const Vec3& v : vertices) pts.push_back(to_bg(v));
    tree_ = VertexTree(pts.begin(), pts.end());
  }

  double distance(const Vec3& q) const {
    std::vector<BgPoint> hit;
    tree_.query(bgi::nearest(to_bg(q), 1), std::back_inserter(hit));
    return bg::distance(hit.front(), to_bg(q));
  }

 private:
  VertexTree tree_;
};

double mean_reflection_error(const TriangleMesh& mesh, const NearestVertex& nn, const Plane& plane, double diagonal) {
  if (diagonal <= 0.0 || mesh.vertices.empty()) return 0.0;
  double sum = 0.0;
  for (const Vec3& v : mesh.vertices) sum += nn.distance(v - 2.0 * plane.signed_distance(v) * plane.normal);
  return sum / static_cast<double>(mesh.vertices.size()) / diagonal;
}

}  // namespace

PrincipalAxes principal_axes(const TriangleMesh& mesh) {
  PrincipalAxes out;
  if (mesh.vertices.empty()) return out;
  out.mean = vertex_centroid(mesh);
  Mat3 cov = Mat3::Zero();
  for (const Vec3& v : mesh.vertices) {
    const Vec3 d = v - out.mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(mesh.vertices.size());

  const double trace = cov.trace();
  const double off = std::max({std::abs(cov(0, 1)), std::abs(cov(0, 2)), std::abs(cov(1, 2))});
  std::array<int, 3> order{0, 1, 2};
  Mat3 basis = Mat3::Identity();
  Vec3 var = cov.diagonal();
  if (off > 1e-9 * trace) {
    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    basis = eig.eigenvectors();
    var = eig.eigenvalues();
    for (int k = 0; k < 3; ++k) {
      // Deterministic sign: largest component positive.
      Eigen::Index i;
      basis.col(k).cwiseAbs().maxCoeff(&i);
      if (basis(i, k) < 0) basis.col(k) = -basis.col(k);
    }
  }
  const double tie = 1e-12 * std::max(trace, 1e-300);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return var[a] > var[b] + tie; });
  for (int k = 0; k < 3; ++k) {
    out.axes.col(k) = basis.col(order[k]);
    out.variances[k] = var[order[k]];
  }
  if (out.axes.determinant() < 0) out.axes.col(2) = -out.axes.col(2);
  return out;
}

double principal_diagonal(const TriangleMesh& mesh) {
  const PrincipalAxes pa = principal_axes(mesh);
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
  for (const Vec3& v : mesh.vertices) {
    const Vec3 q = pa.axes.transpose() * v;
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  return mesh.vertices.empty() ? 0.0 : (hi - lo).norm();
}

double symmetry_error(const TriangleMesh& mesh, const Plane& plane) {
  const NearestVertex nn(mesh.vertices);
  return mean_reflection_error(mesh, nn, plane, principal_diagonal(mesh));
}

SymmetryPlane find_best_symmetry_plane(const TriangleMesh& mesh) {
  if (mesh.vertices.empty()) throw EmptyMesh("symmetry search on an empty mesh");
  const PrincipalAxes pa = principal_axes(mesh);
  const NearestVertex nn(mesh.vertices);
  const double diagonal = principal_diagonal(mesh);
  static constexpr double kOffsets[] = {0.0, -0.05, 0.05, -0.1, 0.1};

  SymmetryPlane best;
  bool have = false;
  for (int k = 0; k < 3; ++k) {
    const Vec3 n = pa.axes.col(k).normalized();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Vec3& v : mesh.vertices) {
      lo = std::min(lo, n.dot(v));
      hi = std::max(hi, n.dot(v));
    }
    for (double f : kOffsets) {
      const Plane plane{n, n.dot(pa.mean) + f * (hi - lo)};
      const double err = mean_reflection_error(mesh, nn, plane, diagonal);
      if (!have || err < best.error_score) {
        best = {plane.normal, plane.offset, err};
        have = true;
      }
    }
  }
  return best;
}

SymmetryCut maybe_symmetry_cut(const TriangleMesh& mesh, double threshold) {
  SymmetryCut out;
  out.plane = find_best_symmetry_plane(mesh);
  if (out.plane.error_score <= threshold) {
    if (!validate_watertight(mesh).is_watertight) throw NonWatertightInput();
    SplitResult halves = split_by_plane(TaggedMesh::from(mesh), out.plane.plane(), true);
    if (!halves.positive.empty() && !halves.negative.empty()) {
      out.parts.push_back(std::move(halves.positive));
      out.parts.push_back(std::move(halves.negative));
      out.cut = true;
      return out;
    }
  }
  out.parts.push_back(TaggedMesh::from(mesh));
  return out;
}

double overhang_area(const TriangleMesh& mesh, const Vec3& up, double tolerance_deg) {
  const double limit = std::sin(tolerance_deg * M_PI / 180.0);
  double area = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vec3 c = mesh.face_cross(t);
    const double len = c.norm();
    if (len == 0.0) continue;
    if (-c.dot(up) / len > limit) area += 0.5 * len;
  }
  return area;
}

const std::array<Mat3, 24>& axis_rotations() {
  static const std::array<Mat3, 24> rotations = [] {
    std::array<Mat3, 24> out;
    std::array<int, 3> perm{0, 1, 2};
    std::size_t n = 0;
    do {
      for (int signs = 0; signs < 8; ++signs) {
        Mat3 m = Mat3::Zero();
        for (int r = 0; r < 3; ++r) m(r, perm[r]) = (signs >> r) & 1 ? -1.0 : 1.0;
        if (m.determinant() > 0) out[n++] = m;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
  }();
  return rotations;
}

Oriented optimize_orientation(const TriangleMesh& mesh, const SymmetryPlane& symmetry, double overhang_tolerance_deg) {
  const PrincipalAxes pa = principal_axes(mesh);
  const Mat3 align = pa.axes.transpose();
  const TriangleMesh aligned = transformed(mesh, align, -(align * pa.mean));
  const Vec3 sym_normal = align * symmetry.normal;
  const double total_area = surface_area(aligned);
  const Aabb box = aabb_of(aligned);

  // Only six build directions exist, so score them once.
  std::array<double, 6> overhang_of_up{};
  for (int k = 0; k < 3; ++k) {
    overhang_of_up[2 * k] = overhang_area(aligned, Vec3::Unit(k), overhang_tolerance_deg);
    overhang_of_up[2 * k + 1] = overhang_area(aligned, -Vec3::Unit(k), overhang_tolerance_deg);
  }
  auto up_slot = [](const Vec3& up) {
    Eigen::Index k;
    up.cwiseAbs().maxCoeff(&k);
    return static_cast<int>(2 * k + (up[k] < 0 ? 1 : 0));
  };

  const auto& rots = axis_rotations();
  int best = 0;
  double best_overhang = 0, best_align = 0, best_height = 0, best_trace = 0;
  for (int i = 0; i < 24; ++i) {
    const Mat3& q = rots[i];
    const Vec3 up = q.transpose() * Vec3::UnitZ();  // build direction in the aligned frame
    const double overhang = overhang_of_up[up_slot(up)];
    const double along_x = std::abs((q * sym_normal).x());
    const double height = box.extent().cwiseAbs().dot(up.cwiseAbs());
    const double trace = (q * align).trace();
    bool better = i == 0;
    if (!better) {
      const double tie = 1e-9 * std::max(total_area, 1e-300);
      if (overhang < best_overhang - tie) better = true;
      else if (overhang <= best_overhang + tie) {
        if (along_x > best_align + 1e-9) better = true;
        else if (along_x >= best_align - 1e-9) {
          const double htie = 1e-9 * box.extent().norm();
          if (height < best_height - htie) better = true;
          else if (height <= best_height + htie && trace > best_trace + 1e-12) better = true;
        }
      }
    }
    if (better) {
      best = i;
      best_overhang = overhang;
      best_align = along_x;
      best_height = height;
      best_trace = trace;
    }
  }

  Oriented out;
  out.rotation_index = best;
  out.pose.rotation = rots[best] * align;
  out.pose.translation = -(out.pose.rotation * pa.mean);
  out.mesh = transformed(mesh, out.pose.rotation, out.pose.translation);
  return out;
}

}  // namespace parallelobox
