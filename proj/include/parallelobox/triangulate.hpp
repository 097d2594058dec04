#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace parallelobox {

using Vec2 = Eigen::Vector2d;

/// A closed polygon ring: `ids[i]` labels the point `pts[i]`; the last point
/// connects back to the first.
struct Ring {
  std::vector<std::int32_t> ids;
  std::vector<Vec2> pts;
};

double signed_area(const std::vector<Vec2>& pts);

/**
 * Triangulates planar regions given as rings. Counterclockwise rings are
 * outer boundaries, clockwise rings are holes; every hole is bridged into the
 * smallest outer ring that contains it and the result is ear-clipped.
 *
 * Output triangles reference ring ids and wind counterclockwise. Every ring
 * edge appears in exactly one output triangle, so the triangles close the
 * rings edge-for-edge even when a ring is degenerate.
 */
std::vector<std::array<std::int32_t, 3>> triangulate_rings(const std::vector<Ring>& rings);

}  // namespace parallelobox
