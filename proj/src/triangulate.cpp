#include "parallelobox/triangulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace parallelobox {

namespace {

struct Node {
  std::int32_t id;
  Vec2 p;
};

using Tri = std::array<std::int32_t, 3>;

double cross(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool point_in_ring(const Vec2& q, const std::vector<Node>& ring) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const Vec2& a = ring[i].p;
    const Vec2& b = ring[j].p;
    if ((a.y() > q.y()) != (b.y() > q.y())) {
      const double x = a.x() + (q.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (q.x() < x) inside = !inside;
    }
  }
  return inside;
}

double ring_area(const std::vector<Node>& ring) {
  double sum = 0.0;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    sum += ring[j].p.x() * ring[i].p.y() - ring[i].p.x() * ring[j].p.y();
  }
  return 0.5 * sum;
}

void fan(const std::vector<Node>& ring, std::vector<Tri>& out) {
  for (std::size_t i = 1; i + 1 < ring.size(); ++i) out.push_back({ring[0].id, ring[i].id, ring[i + 1].id});
}

// True when q sits inside the interior wedge of the corner (prev, cur, next)
// of a counterclockwise polygon.
bool in_corner(const Vec2& prev, const Vec2& cur, const Vec2& next, const Vec2& q) {
  if (cross(prev, cur, next) >= 0) return cross(prev, cur, q) >= 0 && cross(cur, next, q) >= 0;
  return cross(prev, cur, q) >= 0 || cross(cur, next, q) >= 0;
}

// Splices `hole` into `outer` through a bridge from the hole's rightmost
// vertex to a vertex of `outer` that it can see.
void bridge_hole(std::vector<Node>& outer, const std::vector<Node>& hole, double eps) {
  std::size_t m = 0;
  for (std::size_t i = 1; i < hole.size(); ++i) {
    if (hole[i].p.x() > hole[m].p.x() || (hole[i].p.x() == hole[m].p.x() && hole[i].p.y() < hole[m].p.y())) m = i;
  }
  const Vec2 mp = hole[m].p;

  // Nearest crossing of the +x ray from mp with the outer boundary.
  double best_x = std::numeric_limits<double>::infinity();
  std::size_t best = outer.size();
  const std::size_t n = outer.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = outer[i].p;
    const Vec2& b = outer[(i + 1) % n].p;
    if ((a.y() > mp.y() && b.y() > mp.y()) || (a.y() < mp.y() && b.y() < mp.y())) continue;
    double x;
    std::size_t cand;
    if (a.y() == b.y()) {
      if (a.x() < mp.x() && b.x() < mp.x()) continue;
      cand = a.x() <= b.x() ? i : (i + 1) % n;
      x = std::max(mp.x(), std::min(a.x(), b.x()));
    } else {
      x = a.x() + (mp.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (x < mp.x() - eps) continue;
      if (a.y() == mp.y()) cand = i;
      else if (b.y() == mp.y()) cand = (i + 1) % n;
      else cand = a.x() >= b.x() ? i : (i + 1) % n;
    }
    if (x < best_x) {
      best_x = x;
      best = cand;
    }
  }

  if (best == n) {
    // No crossing found; fall back to the nearest vertex.
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (outer[i].p - mp).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
  } else {
    // A reflex vertex inside the triangle (mp, hit, candidate) would block
    // the bridge; take the one closest in angle to the ray instead.
    const Vec2 hit(best_x, mp.y());
    const Vec2 cp = outer[best].p;
    double best_tan = std::numeric_limits<double>::infinity();
    double best_dist = std::numeric_limits<double>::infinity();
    std::size_t blocker = n;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& q = outer[i].p;
      if (q == cp) continue;
      const Vec2& prev = outer[(i + n - 1) % n].p;
      const Vec2& next = outer[(i + 1) % n].p;
      if (cross(prev, q, next) >= 0) continue;  // convex
      const double s1 = cross(mp, hit, q), s2 = cross(hit, cp, q), s3 = cross(cp, mp, q);
      const bool inside = (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
      if (!inside || q.x() < mp.x()) continue;
      const double dx = q.x() - mp.x();
      const double tan = dx > 0 ? std::abs(q.y() - mp.y()) / dx : std::numeric_limits<double>::infinity();
      const double dist = (q - mp).squaredNorm();
      if (tan < best_tan || (tan == best_tan && dist < best_dist)) {
        best_tan = tan;
        best_dist = dist;
        blocker = i;
      }
    }
    if (blocker != n) best = blocker;
  }

  // Earlier bridges duplicate vertices; pick the copy whose corner faces mp.
  const Vec2 target = outer[best].p;
  for (std::size_t i = 0; i < n; ++i) {
    if (outer[i].p != target) continue;
    if (in_corner(outer[(i + n - 1) % n].p, outer[i].p, outer[(i + 1) % n].p, mp)) {
      best = i;
      break;
    }
  }

  std::vector<Node> merged;
  merged.reserve(n + hole.size() + 2);
  merged.insert(merged.end(), outer.begin(), outer.begin() + static_cast<std::ptrdiff_t>(best) + 1);
  for (std::size_t k = 0; k <= hole.size(); ++k) merged.push_back(hole[(m + k) % hole.size()]);
  merged.insert(merged.end(), outer.begin() + static_cast<std::ptrdiff_t>(best), outer.end());
  outer = std::move(merged);
}

void ear_clip(const std::vector<Node>& poly, double eps, std::vector<Tri>& out) {
  const std::size_t n0 = poly.size();
  if (n0 < 3) return;
  std::vector<std::size_t> prev(n0), next(n0);
  for (std::size_t i = 0; i < n0; ++i) {
    prev[i] = (i + n0 - 1) % n0;
    next[i] = (i + 1) % n0;
  }
  auto corner = [&](std::size_t i) { return cross(poly[prev[i]].p, poly[i].p, poly[next[i]].p); };
  // Only reflex (or flat) vertices can lie inside an ear.
  std::vector<char> reflex(n0);
  for (std::size_t i = 0; i < n0; ++i) reflex[i] = corner(i) <= eps;

  auto is_ear = [&](std::size_t k) {
    if (reflex[k]) return false;
    const Vec2& a = poly[prev[k]].p;
    const Vec2& b = poly[k].p;
    const Vec2& c = poly[next[k]].p;
    for (std::size_t j = next[next[k]]; j != prev[k]; j = next[j]) {
      if (!reflex[j]) continue;
      const Vec2& q = poly[j].p;
      if (q == a || q == b || q == c) continue;
      if (cross(a, b, q) >= 0 && cross(b, c, q) >= 0 && cross(c, a, q) >= 0) return false;
    }
    return true;
  };
  auto clip = [&](std::size_t k) {
    out.push_back({poly[prev[k]].id, poly[k].id, poly[next[k]].id});
    const std::size_t p = prev[k], q = next[k];
    next[p] = q;
    prev[q] = p;
    reflex[p] = corner(p) <= eps;
    reflex[q] = corner(q) <= eps;
    return p;
  };

  std::size_t remaining = n0;
  std::size_t cur = 0;
  std::size_t misses = 0;
  while (remaining > 3) {
    if (is_ear(cur)) {
      cur = clip(cur);
      --remaining;
      misses = 0;
      continue;
    }
    cur = next[cur];
    if (++misses < remaining) continue;
    // Stuck: drop a flat or spiky vertex first, otherwise the most convex one.
    std::size_t pick = cur;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t i = cur;
    for (std::size_t step = 0; step < remaining; ++step, i = next[i]) {
      const double c = corner(i);
      if (std::abs(c) <= eps) {
        pick = i;
        break;
      }
      if (c > best) {
        best = c;
        pick = i;
      }
    }
    cur = clip(pick);
    --remaining;
    misses = 0;
  }
  out.push_back({poly[prev[cur]].id, poly[cur].id, poly[next[cur]].id});
}

}  // namespace

double signed_area(const std::vector<Vec2>& pts) {
  double sum = 0.0;
  for (std::size_t i = 0, j = pts.size() - 1; i < pts.size(); j = i++) {
    sum += pts[j].x() * pts[i].y() - pts[i].x() * pts[j].y();
  }
  return 0.5 * sum;
}

std::vector<std::array<std::int32_t, 3>> triangulate_rings(const std::vector<Ring>& rings) {
  std::vector<Tri> out;
  std::vector<std::vector<Node>> outers, holes;
  std::vector<double> outer_area;

  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x, lo_y = lo_x, hi_y = -lo_x;
  for (const Ring& r : rings) {
    for (const Vec2& p : r.pts) {
      lo_x = std::min(lo_x, p.x());
      hi_x = std::max(hi_x, p.x());
      lo_y = std::min(lo_y, p.y());
      hi_y = std::max(hi_y, p.y());
    }
  }
  const double span = std::max(hi_x - lo_x, hi_y - lo_y);
  const double eps = 1e-14 * span * span;

  for (const Ring& r : rings) {
    if (r.ids.size() < 3) continue;
    std::vector<Node> ring(r.ids.size());
    for (std::size_t i = 0; i < ring.size(); ++i) ring[i] = {r.ids[i], r.pts[i]};
    const double a = ring_area(ring);
    if (std::abs(a) <= eps) {
      fan(ring, out);  // sliver: keep the edges closed
    } else if (a > 0) {
      outer_area.push_back(a);
      outers.push_back(std::move(ring));
    } else {
      holes.push_back(std::move(ring));
    }
  }

  std::vector<std::vector<std::size_t>> holes_of(outers.size());
  for (std::size_t h = 0; h < holes.size(); ++h) {
    std::size_t owner = outers.size();
    for (std::size_t o = 0; o < outers.size(); ++o) {
      int votes = 0;
      for (const Node& v : holes[h]) votes += point_in_ring(v.p, outers[o]) ? 1 : -1;
      if (votes > 0 && (owner == outers.size() || outer_area[o] < outer_area[owner])) owner = o;
    }
    if (owner == outers.size()) fan(holes[h], out);
    else holes_of[owner].push_back(h);
  }

  for (std::size_t o = 0; o < outers.size(); ++o) {
    std::vector<Node> poly = outers[o];
    auto& hs = holes_of[o];
    auto max_x = [&](std::size_t h) {
      double m = -std::numeric_limits<double>::infinity();
      for (const Node& v : holes[h]) m = std::max(m, v.p.x());
      return m;
    };
    std::stable_sort(hs.begin(), hs.end(), [&](std::size_t a, std::size_t b) { return max_x(a) > max_x(b); });
    for (std::size_t h : hs) bridge_hole(poly, holes[h], eps);
    ear_clip(poly, eps, out);
  }
  return out;
}

}  // namespace parallelobox
