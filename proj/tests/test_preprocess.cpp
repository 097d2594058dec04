#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "fixtures.hpp"
#include "parallelobox/preprocess.hpp"

using namespace parallelobox;

namespace {

// Box diagonal in the frame of the covariance eigenvectors (SVD route).
double principal_box_diagonal(const TriangleMesh& m) {
  Eigen::MatrixXd x(m.vertices.size(), 3);
  Vec3 mean = Vec3::Zero();
  for (const Vec3& v : m.vertices) mean += v;
  mean /= static_cast<double>(m.vertices.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = (m.vertices[i] - mean).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  const Eigen::MatrixXd proj = x * svd.matrixV();
  return (proj.colwise().maxCoeff() - proj.colwise().minCoeff()).norm();
}

// O(n^2) nearest neighbour mismatch.
double brute_symmetry_error(const TriangleMesh& m, const Vec3& n, double offset) {
  const double diag = principal_box_diagonal(m);
  double sum = 0.0;
  for (const Vec3& v : m.vertices) {
    const Vec3 r = v - 2.0 * (n.dot(v) - offset) * n;
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& w : m.vertices) best = std::min(best, (w - r).norm());
    sum += best;
  }
  return sum / static_cast<double>(m.vertices.size()) / diag;
}

// Candidate planes rebuilt from an SVD of the centered vertex matrix.
double brute_best_error(const TriangleMesh& m) {
  Eigen::MatrixXd x(m.vertices.size(), 3);
  Vec3 mean = Vec3::Zero();
  for (const Vec3& v : m.vertices) mean += v;
  mean /= static_cast<double>(m.vertices.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = (m.vertices[i] - mean).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const Vec3 n = svd.matrixV().col(k).normalized();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Vec3& v : m.vertices) {
      lo = std::min(lo, n.dot(v));
      hi = std::max(hi, n.dot(v));
    }
    for (double f : {0.0, -0.05, 0.05, -0.1, 0.1}) best = std::min(best, brute_symmetry_error(m, n, n.dot(mean) + f * (hi - lo)));
  }
  return best;
}

double brute_overhang_up_z(const TriangleMesh& m, double tol_deg) {
  double a = 0.0;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    const Vec3 c = m.face_cross(t);
    if (-c.normalized().z() > std::sin(tol_deg * M_PI / 180.0)) a += 0.5 * c.norm();
  }
  return a;
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized().toRotationMatrix();
}

bool is_signed_permutation(const Mat3& r) {
  for (int i = 0; i < 3; ++i) {
    int nonzero = 0;
    for (int j = 0; j < 3; ++j) {
      if (std::abs(r(i, j)) > 1e-9) {
        ++nonzero;
        if (std::abs(std::abs(r(i, j)) - 1.0) > 1e-9) return false;
      }
    }
    if (nonzero != 1) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("axis rotations") {
  const auto& rots = axis_rotations();
  CHECK(rots[0] == Mat3::Identity());
  for (std::size_t i = 0; i < rots.size(); ++i) {
    CHECK(rots[i].determinant() == doctest::Approx(1.0));
    CHECK(is_signed_permutation(rots[i]));
    for (std::size_t j = 0; j < i; ++j) CHECK((rots[i] - rots[j]).norm() > 0.5);
  }
}

TEST_CASE("principal axes of a box follow its extents") {
  const auto pa = principal_axes(fixtures::box({0, 0, 0}, {3, 10, 5}));
  CHECK(std::abs(pa.axes.col(0).dot(Vec3::UnitY())) == doctest::Approx(1.0));
  CHECK(std::abs(pa.axes.col(1).dot(Vec3::UnitZ())) == doctest::Approx(1.0));
  CHECK(pa.axes.determinant() == doctest::Approx(1.0));
}

TEST_CASE("a cube is mirror symmetric") {
  const auto s = find_best_symmetry_plane(fixtures::unit_cube());
  CHECK(s.error_score < 1e-6);
  CHECK(std::abs(s.normal.norm() - 1.0) < 1e-12);
}

TEST_CASE("cube with a displaced corner") {
  TriangleMesh m = fixtures::unit_cube();
  const double diag = std::sqrt(3.0);
  auto far = std::max_element(m.vertices.begin(), m.vertices.end(), [](const Vec3& a, const Vec3& b) { return a.sum() < b.sum(); });
  // A direction outside every mirror plane of the cube.
  *far += 0.1 * diag * Vec3(0.2, 0.5, 0.84).normalized();
  const auto s = find_best_symmetry_plane(m);
  CHECK(s.error_score > 0);
  CHECK(s.error_score == doctest::Approx(brute_symmetry_error(m, s.normal, s.offset)).epsilon(1e-9));
  CHECK(s.error_score == doctest::Approx(brute_best_error(m)).epsilon(1e-9));
}

TEST_CASE("asymmetric blob is above the threshold") {
  const TriangleMesh blob = fixtures::asymmetric_blob();
  const auto s = find_best_symmetry_plane(blob);
  CHECK(s.error_score == doctest::Approx(brute_best_error(blob)).epsilon(1e-9));
  CHECK(s.error_score > kDefaultSymmetryThreshold);
}

TEST_CASE("symmetry error is invariant under rigid motion") {
  std::mt19937_64 rng(1);
  for (const TriangleMesh& m : {fixtures::dumbbell(), fixtures::asymmetric_blob(), fixtures::l_bracket()}) {
    const double e0 = find_best_symmetry_plane(m).error_score;
    for (int i = 0; i < 5; ++i) {
      const TriangleMesh moved = transformed(m, random_rotation(rng), Vec3(3.0 * i, -7.0, 11.0));
      CHECK(std::abs(find_best_symmetry_plane(moved).error_score - e0) < 1e-6);
    }
  }
}

TEST_CASE("symmetry cut") {
  SUBCASE("cube splits evenly") {
    const auto cut = maybe_symmetry_cut(fixtures::unit_cube(), 0.01);
    REQUIRE(cut.cut);
    REQUIRE(cut.parts.size() == 2);
    const double a = measure(cut.parts[0].mesh).volume, b = measure(cut.parts[1].mesh).volume;
    CHECK(std::abs(a - b) / (a + b) < 1e-6);
    CHECK(a + b == doctest::Approx(1.0));
    CHECK(validate_watertight(cut.parts[0].mesh).is_watertight);
  }
  SUBCASE("blob is left alone") {
    const TriangleMesh blob = fixtures::asymmetric_blob();
    const auto cut = maybe_symmetry_cut(blob, 0.01);
    CHECK_FALSE(cut.cut);
    REQUIRE(cut.parts.size() == 1);
    CHECK(cut.parts[0].mesh.triangles == blob.triangles);
    CHECK(cut.parts[0].mesh.vertices == blob.vertices);
  }
  SUBCASE("sphere halves") {
    const auto cut = maybe_symmetry_cut(fixtures::sphere(), 0.01);
    REQUIRE(cut.cut);
    const double half = 2.0 / 3.0 * M_PI * 1000.0;
    for (const auto& p : cut.parts) CHECK(std::abs(measure(p.mesh).volume - half) / half < 0.02);
  }
  SUBCASE("dumbbell halves are mirror images") {
    const auto cut = maybe_symmetry_cut(fixtures::dumbbell(), 0.01);
    REQUIRE(cut.cut);
    const auto a = measure(cut.parts[0].mesh), b = measure(cut.parts[1].mesh);
    CHECK(a.volume == doctest::Approx(b.volume).epsilon(1e-9));
    CHECK(a.surface_area == doctest::Approx(b.surface_area).epsilon(1e-9));
  }
}

TEST_CASE("overhang area of a cube counts the bottom face") {
  const TriangleMesh cube = fixtures::unit_cube();
  for (int k = 0; k < 3; ++k) {
    CHECK(overhang_area(cube, Vec3::Unit(k), 1.0) == doctest::Approx(1.0));
    CHECK(overhang_area(cube, -Vec3::Unit(k), 1.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("orientation of an axis-aligned centered cube is the identity") {
  const TriangleMesh cube = fixtures::box({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5});
  const auto o = optimize_orientation(cube, find_best_symmetry_plane(cube), 1.0);
  CHECK((o.pose.rotation - Mat3::Identity()).norm() < 1e-12);
  CHECK(o.pose.translation.norm() < 1e-12);
}

TEST_CASE("orientation recenters a translated cube") {
  const TriangleMesh cube = fixtures::box({9.5, -0.5, -0.5}, {10.5, 0.5, 0.5});
  const auto o = optimize_orientation(cube, find_best_symmetry_plane(cube), 1.0);
  CHECK(is_signed_permutation(o.pose.rotation));
  CHECK((o.pose.translation - Vec3(-10, 0, 0)).norm() < 1e-9);
}

TEST_CASE("orientation minimizes overhang over all 24 rotations") {
  for (const TriangleMesh& m : {fixtures::wedge(), fixtures::hemisphere(), fixtures::l_bracket(), fixtures::asymmetric_blob()}) {
    const auto sym = find_best_symmetry_plane(m);
    const auto o = optimize_orientation(m, sym, 1.0);
    const auto& rots = axis_rotations();
    const TriangleMesh aligned = transformed(o.mesh, rots[o.rotation_index].transpose(), Vec3::Zero());
    double best = std::numeric_limits<double>::infinity();
    for (const Mat3& q : rots) best = std::min(best, brute_overhang_up_z(transformed(aligned, q, Vec3::Zero()), 1.0));
    CHECK(brute_overhang_up_z(o.mesh, 1.0) == doctest::Approx(best).epsilon(1e-9));

    CHECK(vertex_centroid(o.mesh).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(o.pose.rotation.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    const auto a = measure(m), b = measure(o.mesh);
    CHECK(std::abs(a.volume - b.volume) <= 1e-9 * a.volume);
    CHECK(std::abs(a.surface_area - b.surface_area) <= 1e-9 * a.surface_area);
    for (std::size_t i = 0; i < m.vertices.size(); i += 7) CHECK((o.pose.apply(m.vertices[i]) - o.mesh.vertices[i]).norm() < 1e-9);
    for (std::size_t i = 0; i < m.vertices.size(); i += 7) {
      CHECK((o.pose.inverse().apply(o.mesh.vertices[i]) - m.vertices[i]).norm() < 1e-9);
    }
  }
}
