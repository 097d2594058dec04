#include "parallelobox/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "parallelobox/errors.hpp"

namespace parallelobox {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t edge_key(std::int32_t a, std::int32_t b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

template <typename T>
T read_le(const char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  return value;
}

void append_le_float(std::string& out, float value) {
  char buf[4];
  std::memcpy(buf, &value, 4);
  out.append(buf, 4);
}

// Splits an n-gon into a triangle fan.
void add_polygon(TriangleMesh& mesh, const std::vector<std::int32_t>& poly) {
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    mesh.triangles.push_back({poly[0], poly[i], poly[i + 1]});
  }
}

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

Vec3 TriangleMesh::face_cross(std::size_t tri) const {
  const Vec3& a = vertices[triangles[tri][0]];
  const Vec3& b = vertices[triangles[tri][1]];
  const Vec3& c = vertices[triangles[tri][2]];
  return (b - a).cross(c - a);
}

Aabb Aabb::scaled(double factor) const {
  const Vec3 c = center();
  const Vec3 half = 0.5 * factor * extent();
  return {c - half, c + half};
}

MeshFormat detect_format(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".obj") return MeshFormat::Obj;
  const std::string bytes = read_file(path);
  if (bytes.size() >= 84) {
    const auto count = read_le<std::uint32_t>(bytes.data() + 80);
    if (bytes.size() == 84 + 50ull * count) return MeshFormat::StlBinary;
  }
  if (bytes.rfind("solid", 0) == 0) return MeshFormat::StlAscii;
  return MeshFormat::StlBinary;
}

TriangleMesh parse_stl_binary(const std::string& bytes, const std::string& name) {
  if (bytes.size() < 84) throw ParseError("binary STL shorter than its 84-byte preamble");
  const auto count = read_le<std::uint32_t>(bytes.data() + 80);
  if (bytes.size() < 84 + 50ull * count) {
    throw ParseError("binary STL declares " + std::to_string(count) + " triangles but is truncated");
  }
  TriangleMesh mesh;
  mesh.name = name;
  mesh.vertices.reserve(3ull * count);
  mesh.triangles.reserve(count);
  for (std::uint32_t t = 0; t < count; ++t) {
    const char* rec = bytes.data() + 84 + 50ull * t + 12;  // skip the stored normal
    const auto base = static_cast<std::int32_t>(mesh.vertices.size());
    for (int k = 0; k < 3; ++k) {
      const char* v = rec + 12 * k;
      mesh.vertices.emplace_back(read_le<float>(v), read_le<float>(v + 4), read_le<float>(v + 8));
    }
    mesh.triangles.push_back({base, base + 1, base + 2});
  }
  return mesh;
}

TriangleMesh parse_stl_ascii(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string token;
  if (!(in >> token) || token != "solid") throw ParseError("ASCII STL must start with 'solid'");
  std::getline(in, token);  // solid name

  TriangleMesh mesh;
  mesh.name = name;
  std::vector<std::int32_t> loop;
  bool in_loop = false;
  while (in >> token) {
    if (token == "facet") {
      std::getline(in, token);
    } else if (token == "outer") {
      in >> token;
      if (token != "loop") throw ParseError("expected 'loop' after 'outer'");
      loop.clear();
      in_loop = true;
    } else if (token == "vertex") {
      if (!in_loop) throw ParseError("vertex outside of an outer loop");
      double x, y, z;
      if (!(in >> x >> y >> z)) throw ParseError("malformed vertex coordinates");
      loop.push_back(static_cast<std::int32_t>(mesh.vertices.size()));
      mesh.vertices.emplace_back(x, y, z);
    } else if (token == "endloop") {
      if (loop.size() < 3) throw ParseError("facet with fewer than three vertices");
      add_polygon(mesh, loop);
      in_loop = false;
    } else if (token == "endfacet") {
      if (in_loop) throw ParseError("facet ended inside an open loop");
    } else if (token == "endsolid") {
      break;
    } else {
      throw ParseError("unexpected token '" + token + "' in ASCII STL");
    }
  }
  if (in_loop) throw ParseError("unterminated outer loop");
  return mesh;
}

TriangleMesh parse_obj(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  TriangleMesh mesh;
  mesh.name = name;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw ParseError("bad vertex on OBJ line " + std::to_string(line_no));
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<std::int32_t> poly;
      std::string ref;
      while (ls >> ref) {
        long idx = 0;
        try {
          idx = std::stol(ref.substr(0, ref.find('/')));
        } catch (const std::exception&) {
          throw ParseError("bad face index on OBJ line " + std::to_string(line_no));
        }
        const long n = static_cast<long>(mesh.vertices.size());
        const long resolved = idx > 0 ? idx - 1 : n + idx;
        if (idx == 0 || resolved < 0 || resolved >= n) {
          throw ParseError("face index out of range on OBJ line " + std::to_string(line_no));
        }
        poly.push_back(static_cast<std::int32_t>(resolved));
      }
      if (poly.size() < 3) throw ParseError("face with fewer than three vertices on OBJ line " + std::to_string(line_no));
      add_polygon(mesh, poly);
    }
  }
  return mesh;
}

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  const std::string bytes = read_file(path);
  const std::string name = path.stem().string();
  TriangleMesh raw;
  switch (format) {
    case MeshFormat::StlBinary: raw = parse_stl_binary(bytes, name); break;
    case MeshFormat::StlAscii: raw = parse_stl_ascii(bytes, name); break;
    case MeshFormat::Obj: raw = parse_obj(bytes, name); break;
  }
  return clean_mesh(std::move(raw));
}

TriangleMesh load_mesh(const std::filesystem::path& path) { return load_mesh(path, detect_format(path)); }

std::string to_stl_binary(const TriangleMesh& mesh) {
  std::string out(80, '\0');
  const std::string header = "parallelobox " + mesh.name;
  std::memcpy(out.data(), header.data(), std::min<std::size_t>(header.size(), 80));
  const auto count = static_cast<std::uint32_t>(mesh.triangles.size());
  char buf[4];
  std::memcpy(buf, &count, 4);
  out.append(buf, 4);
  out.reserve(out.size() + 50ull * count);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    Vec3 n = mesh.face_cross(t);
    const double len = n.norm();
    if (len > 0) n /= len;
    for (int k = 0; k < 3; ++k) append_le_float(out, static_cast<float>(n[k]));
    for (int c = 0; c < 3; ++c) {
      const Vec3& v = mesh.corner(t, c);
      for (int k = 0; k < 3; ++k) append_le_float(out, static_cast<float>(v[k]));
    }
    out.append(2, '\0');
  }
  return out;
}

void write_stl_binary(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw Error("cannot write " + path.string());
  const std::string bytes = to_stl_binary(mesh);
  outf.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

TriangleMesh clean_mesh(TriangleMesh mesh, double weld_tolerance) {
  // Weld through a hash grid with cell size equal to the tolerance; a match
  // can sit in any of the 27 neighbouring cells.
  std::unordered_map<CellKey, std::vector<std::int32_t>, CellKeyHash> buckets;
  std::vector<Vec3> welded;
  std::vector<std::int32_t> remap(mesh.vertices.size());
  const double inv = 1.0 / weld_tolerance;
  const double tol2 = weld_tolerance * weld_tolerance;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& p = mesh.vertices[i];
    const CellKey key{static_cast<std::int64_t>(std::floor(p.x() * inv)),
                      static_cast<std::int64_t>(std::floor(p.y() * inv)),
                      static_cast<std::int64_t>(std::floor(p.z() * inv))};
    std::int32_t found = -1;
    for (int dx = -1; dx <= 1 && found < 0; ++dx) {
      for (int dy = -1; dy <= 1 && found < 0; ++dy) {
        for (int dz = -1; dz <= 1 && found < 0; ++dz) {
          auto it = buckets.find({key.x + dx, key.y + dy, key.z + dz});
          if (it == buckets.end()) continue;
          for (std::int32_t cand : it->second) {
            if ((welded[cand] - p).squaredNorm() <= tol2) {
              found = cand;
              break;
            }
          }
        }
      }
    }
    if (found < 0) {
      found = static_cast<std::int32_t>(welded.size());
      welded.push_back(p);
      buckets[key].push_back(found);
    }
    remap[i] = found;
  }

  TriangleMesh out;
  out.name = std::move(mesh.name);
  out.vertices = std::move(welded);
  out.triangles.reserve(mesh.triangles.size());
  for (const Triangle& t : mesh.triangles) {
    const Triangle w{remap[t[0]], remap[t[1]], remap[t[2]]};
    if (w[0] == w[1] || w[1] == w[2] || w[0] == w[2]) continue;
    const Vec3 cross = (out.vertices[w[1]] - out.vertices[w[0]]).cross(out.vertices[w[2]] - out.vertices[w[0]]);
    if (0.5 * cross.norm() <= kDegenerateArea) continue;
    out.triangles.push_back(w);
  }
  if (out.triangles.empty()) throw EmptyMesh();
  compact_vertices(out);
  return out;
}

void compact_vertices(TriangleMesh& mesh) {
  std::vector<std::int32_t> remap(mesh.vertices.size(), -1);
  std::vector<Vec3> kept;
  kept.reserve(mesh.vertices.size());
  for (Triangle& t : mesh.triangles) {
    for (auto& idx : t) {
      if (remap[idx] < 0) {
        remap[idx] = static_cast<std::int32_t>(kept.size());
        kept.push_back(mesh.vertices[idx]);
      }
      idx = remap[idx];
    }
  }
  mesh.vertices = std::move(kept);
}

WatertightReport validate_watertight(const TriangleMesh& mesh) {
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(mesh.triangles.size() * 3);
  for (const Triangle& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) ++directed[edge_key(t[k], t[(k + 1) % 3])];
  }
  WatertightReport report;
  for (const auto& [key, count] : directed) {
    const auto a = static_cast<std::int32_t>(key >> 32);
    const auto b = static_cast<std::int32_t>(key & 0xffffffffu);
    auto rev = directed.find(edge_key(b, a));
    const int reverse = rev == directed.end() ? 0 : rev->second;
    const bool ok = count == 1 && reverse == 1;
    // Count each undirected edge once: from its smaller endpoint, or from
    // whichever direction exists when the reverse is missing.
    if (!ok && (a < b || reverse == 0)) ++report.open_edge_count;
  }
  report.is_watertight = !mesh.triangles.empty() && report.open_edge_count == 0;
  return report;
}

Vec3 vertex_centroid(const TriangleMesh& mesh) {
  Vec3 sum = Vec3::Zero();
  for (const Vec3& v : mesh.vertices) sum += v;
  return mesh.vertices.empty() ? sum : Vec3(sum / static_cast<double>(mesh.vertices.size()));
}

double signed_volume(const TriangleMesh& mesh) {
  if (mesh.triangles.empty()) return 0.0;
  // Tetrahedra fan from a nearby reference point keeps the sum well conditioned.
  const Vec3 ref = mesh.vertices[mesh.triangles.front()[0]];
  double sum = 0.0;
  for (const Triangle& t : mesh.triangles) {
    const Vec3 a = mesh.vertices[t[0]] - ref;
    const Vec3 b = mesh.vertices[t[1]] - ref;
    const Vec3 c = mesh.vertices[t[2]] - ref;
    sum += a.dot(b.cross(c));
  }
  return sum / 6.0;
}

double surface_area(const TriangleMesh& mesh) {
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) sum += mesh.face_area(t);
  return sum;
}

MeshMeasures measure(const TriangleMesh& mesh) {
  return {signed_volume(mesh), surface_area(mesh), vertex_centroid(mesh)};
}

Aabb aabb_of(const TriangleMesh& mesh) {
  if (mesh.vertices.empty()) return {};
  Aabb box{mesh.vertices.front(), mesh.vertices.front()};
  for (const Vec3& v : mesh.vertices) {
    box.min = box.min.cwiseMin(v);
    box.max = box.max.cwiseMax(v);
  }
  return box;
}

TriangleMesh transformed(const TriangleMesh& mesh, const Mat3& rotation, const Vec3& translation) {
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v = rotation * v + translation;
  return out;
}

TriangleMesh translated(const TriangleMesh& mesh, const Vec3& offset) {
  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v += offset;
  return out;
}

}  // namespace parallelobox
