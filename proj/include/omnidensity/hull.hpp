#pragma once
#include <algorithm>
#include <vector>

#include "omnidensity/error.hpp"
#include "omnidensity/types.hpp"

namespace omni {

using Polygon = std::vector<Vec2<double>>;

inline double cross2(const Vec2<double>& o, const Vec2<double>& a, const Vec2<double>& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Monotone chain. Vertices come back counterclockwise (u right, v down,
// counterclockwise in (u, v) coordinates) with no collinear duplicates.
inline Polygon convex_hull(Polygon points) {
  std::sort(points.begin(), points.end(), [](const Vec2<double>& a, const Vec2<double>& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const Vec2<double>& a, const Vec2<double>& b) {
                             return a.x() == b.x() && a.y() == b.y();
                           }),
               points.end());
  require(points.size() >= 3, Err::degenerate_hull, "need at least 3 distinct points");

  Polygon h(2 * points.size());
  size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross2(h[k - 2], h[k - 1], points[i]) <= 0) --k;
    h[k++] = points[i];
  }
  h.resize(k - 1);
  require(h.size() >= 3, Err::degenerate_hull, "all points are collinear");
  return h;
}

// Ray casting with a closed boundary: points on an edge count as inside.
inline bool point_in_polygon(const Vec2<double>& p, const Polygon& poly) {
  const size_t n = poly.size();
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2<double>& a = poly[j];
    const Vec2<double>& b = poly[i];
    const double cross = (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
    if (cross == 0.0 && (p.x() - a.x()) * (p.x() - b.x()) <= 0.0 &&
        (p.y() - a.y()) * (p.y() - b.y()) <= 0.0)
      return true;  // on the segment [a, b]
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x_hit = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < x_hit) inside = !inside;
    }
  }
  return inside;
}

inline void polygon_bounds(const Polygon& poly, Vec2<double>& lo, Vec2<double>& hi) {
  require(!poly.empty(), Err::empty_input, "empty polygon");
  lo = hi = poly.front();
  for (const auto& p : poly) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
}

}  // namespace omni
