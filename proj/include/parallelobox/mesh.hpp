#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace parallelobox {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Triangle = std::array<std::int32_t, 3>;

/// Vertices closer than this are merged on load (mm).
inline constexpr double kWeldTolerance = 1e-6;
/// Triangles with area at or below this are dropped on load (mm^2).
inline constexpr double kDegenerateArea = 1e-12;

/**
 * Indexed triangle soup. Triangles wind counterclockwise when seen from
 * outside, so face normals point out of the solid.
 */
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::string name;

  bool empty() const { return triangles.empty(); }
  std::size_t triangle_count() const { return triangles.size(); }
  std::size_t vertex_count() const { return vertices.size(); }

  Vec3 corner(std::size_t tri, int k) const { return vertices[triangles[tri][k]]; }
  /// Unnormalized face normal (length = 2 * area).
  Vec3 face_cross(std::size_t tri) const;
  double face_area(std::size_t tri) const { return 0.5 * face_cross(tri).norm(); }
};

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  bool overlaps(const Aabb& other) const {
    return (min.array() <= other.max.array()).all() && (other.min.array() <= max.array()).all();
  }
  /// Scales the box about its center.
  Aabb scaled(double factor) const;
};

struct MeshMeasures {
  double volume = 0.0;        // mm^3
  double surface_area = 0.0;  // mm^2
  Vec3 centroid = Vec3::Zero();
};

struct WatertightReport {
  bool is_watertight = false;
  std::size_t open_edge_count = 0;
};

enum class MeshFormat { StlBinary, StlAscii, Obj };

/// Guesses the format from the extension and, for .stl, from the file contents.
MeshFormat detect_format(const std::filesystem::path& path);

/// Loads and cleans a mesh: welds vertices within kWeldTolerance and drops
/// degenerate triangles. Throws ParseError or EmptyMesh.
TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriangleMesh load_mesh(const std::filesystem::path& path);

/// Parses from memory; `name` becomes the mesh label.
TriangleMesh parse_stl_binary(const std::string& bytes, const std::string& name = {});
TriangleMesh parse_stl_ascii(const std::string& text, const std::string& name = {});
TriangleMesh parse_obj(const std::string& text, const std::string& name = {});

void write_stl_binary(const TriangleMesh& mesh, const std::filesystem::path& path);
std::string to_stl_binary(const TriangleMesh& mesh);

/// Welds coincident vertices, drops degenerate and collapsed triangles and
/// unreferenced vertices. Throws EmptyMesh when nothing is left.
TriangleMesh clean_mesh(TriangleMesh mesh, double weld_tolerance = kWeldTolerance);

/// Removes vertices no triangle references; keeps everything else as is.
void compact_vertices(TriangleMesh& mesh);

WatertightReport validate_watertight(const TriangleMesh& mesh);
MeshMeasures measure(const TriangleMesh& mesh);
double signed_volume(const TriangleMesh& mesh);
double surface_area(const TriangleMesh& mesh);
Vec3 vertex_centroid(const TriangleMesh& mesh);
Aabb aabb_of(const TriangleMesh& mesh);

/// Applies x' = rotation * x + translation to every vertex.
TriangleMesh transformed(const TriangleMesh& mesh, const Mat3& rotation, const Vec3& translation);
TriangleMesh translated(const TriangleMesh& mesh, const Vec3& offset);

}  // namespace parallelobox
