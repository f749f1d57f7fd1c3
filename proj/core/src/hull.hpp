#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace junction::detail {

struct P2 {
  double x;
  double y;
  friend bool operator<(const P2& a, const P2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }
  friend bool operator==(const P2& a, const P2& b) = default;
};

inline double cross(const P2& o, const P2& a, const P2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Monotone chain, counter-clockwise, collinear points dropped.
inline std::vector<P2> convex_hull(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<P2> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lo = k + 1; i-- > 0;) {
    while (k >= lo && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

/// Signed distance from q to the hull's boundary, positive inside.
/// Degenerate hulls (fewer than 3 vertices) contain nothing with positive
/// margin; their distance is the negated distance to the point/segment.
inline double hull_margin(const std::vector<P2>& hull, const P2& q) {
  if (hull.empty()) return -INFINITY;
  if (hull.size() == 1) return -std::hypot(q.x - hull[0].x, q.y - hull[0].y);
  if (hull.size() == 2) {
    const P2& a = hull[0];
    const P2& b = hull[1];
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double t = std::clamp(((q.x - a.x) * dx + (q.y - a.y) * dy) / (dx * dx + dy * dy), 0.0, 1.0);
    return -std::hypot(q.x - a.x - t * dx, q.y - a.y - t * dy);
  }
  double margin = INFINITY;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const P2& a = hull[i];
    const P2& b = hull[(i + 1) % hull.size()];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    margin = std::min(margin, cross(a, b, q) / len);
  }
  return margin;
}

/// Range of y over the hull restricted to the slab |x| <= eps.
/// Returns {+inf, -inf} when the slab misses the hull.
inline std::pair<double, double> slab_range(const std::vector<P2>& hull, double eps) {
  double lo = INFINITY, hi = -INFINITY;
  auto take = [&](double y) {
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  };
  for (const auto& p : hull) {
    if (std::abs(p.x) <= eps) take(p.y);
  }
  const std::size_t n = hull.size();
  for (std::size_t i = 0; n >= 2 && i < n; ++i) {
    const P2& a = hull[i];
    const P2& b = hull[(i + 1) % n];
    for (double edge_x : {-eps, eps}) {
      if ((a.x - edge_x) * (b.x - edge_x) < 0.0) {
        const double t = (edge_x - a.x) / (b.x - a.x);
        take(a.y + t * (b.y - a.y));
      }
    }
  }
  return {lo, hi};
}

}  // namespace junction::detail
