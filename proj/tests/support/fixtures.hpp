#pragma once

#include <array>
#include <string>
#include <vector>

#include "parallelobox/mesh.hpp"

namespace fixtures {

using parallelobox::TriangleMesh;
using parallelobox::Vec3;

TriangleMesh box(const Vec3& lo, const Vec3& hi, const std::string& name = "box");
TriangleMesh unit_cube();
TriangleMesh icosphere(double radius, int subdivisions, const Vec3& center = Vec3::Zero());
/// r=10, 1280 faces.
TriangleMesh sphere();

/// Boundary of a union of axis-aligned voxels of edge `size`.
TriangleMesh voxels(const std::vector<std::array<int, 3>>& cells, double size, const std::string& name);

TriangleMesh dumbbell();     // 70 x 20 x 20 mm, mirror symmetric
TriangleMesh l_bracket();    // 40 x 30 x 15 mm, unequal legs
TriangleMesh hollow_box();   // 30 x 30 x 20 mm open-top tray
TriangleMesh wedge();        // right prism, one 45 degree face
TriangleMesh asymmetric_blob();
TriangleMesh hemisphere();   // flat side on z = 0, dome up

std::string ascii_stl(const TriangleMesh& mesh);

}  // namespace fixtures
