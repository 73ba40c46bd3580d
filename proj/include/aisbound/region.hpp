#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "rational.hpp"

namespace aisbound {

// Closed half-plane a1*x + a2*y <= b.
struct HalfPlane {
  Rat a1, a2, b;

  HalfPlane(Rat a1_, Rat a2_, Rat b_) : a1(a1_), a2(a2_), b(b_) {
    if (a1 == Rat(0) && a2 == Rat(0))
      throw std::invalid_argument("half-plane: both coefficients zero");
  }

  bool contains(const Rat &x, const Rat &y) const { return a1 * x + a2 * y <= b; }
  bool tight_at(const Rat &x, const Rat &y) const { return a1 * x + a2 * y == b; }
};

struct RatPoint {
  Rat x, y;

  bool operator==(const RatPoint &o) const { return x == o.x && y == o.y; }
  bool operator<(const RatPoint &o) const { return x != o.x ? x < o.x : y < o.y; }
};

// The two-user GDoF outer bound for the worked (5,5,2,3) channel shape.
inline std::vector<HalfPlane> theorem5_region() {
  return {
      HalfPlane(Rat(-1), Rat(0), Rat(0)),          // d1 >= 0
      HalfPlane(Rat(0), Rat(-1), Rat(0)),          // d2 >= 0
      HalfPlane(Rat(1), Rat(0), Rat(2)),           // d1 <= 2
      HalfPlane(Rat(0), Rat(1), Rat(3)),           // d2 <= 3
      HalfPlane(rat(1, 2), rat(1, 3), rat(3, 2)),  // d1/2 + d2/3 <= 3/2
      HalfPlane(Rat(1), Rat(1), rat(34, 9)),       // d1 + d2 <= 34/9
  };
}

inline bool region_contains(const std::vector<HalfPlane> &planes, const Rat &x, const Rat &y) {
  for (const auto &h : planes)
    if (!h.contains(x, y)) return false;
  return true;
}

namespace detail {

// A nonzero recession direction must run along some constraint boundary, so
// scanning the perpendiculars of every normal decides boundedness exactly.
inline bool has_recession_direction(const std::vector<HalfPlane> &planes) {
  if (planes.empty()) return true;
  for (const auto &h : planes) {
    const RatPoint candidates[2] = {{h.a2, -h.a1}, {-h.a2, h.a1}};
    for (const auto &v : candidates) {
      bool ok = true;
      for (const auto &g : planes)
        if (g.a1 * v.x + g.a2 * v.y > Rat(0)) {
          ok = false;
          break;
        }
      if (ok) return true;
    }
  }
  return false;
}

inline Rat cross(const RatPoint &origin, const RatPoint &a, const RatPoint &b) {
  return (a.x - origin.x) * (b.y - origin.y) - (a.y - origin.y) * (b.x - origin.x);
}

}  // namespace detail

/**
 * All extreme points of the intersection, deduplicated and ordered
 * counterclockwise starting from the lexicographically smallest point.
 * Every arithmetic step is rational, so the output is exact.
 */
inline std::vector<RatPoint> vertices(const std::vector<HalfPlane> &planes) {
  if (detail::has_recession_direction(planes))
    throw std::domain_error("vertices: unbounded region");

  std::vector<RatPoint> found;
  for (std::size_t i = 0; i < planes.size(); ++i)
    for (std::size_t j = i + 1; j < planes.size(); ++j) {
      const HalfPlane &p = planes[i], &q = planes[j];
      Rat det = p.a1 * q.a2 - p.a2 * q.a1;
      if (det == Rat(0)) continue;
      RatPoint pt{(p.b * q.a2 - p.a2 * q.b) / det, (p.a1 * q.b - p.b * q.a1) / det};
      if (region_contains(planes, pt.x, pt.y)) found.push_back(pt);
    }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  if (found.size() <= 2) return found;

  RatPoint center{Rat(0), Rat(0)};
  for (const auto &p : found) {
    center.x += p.x;
    center.y += p.y;
  }
  center.x /= Rat(static_cast<long long>(found.size()));
  center.y /= Rat(static_cast<long long>(found.size()));

  auto half = [&](const RatPoint &p) {
    Rat dy = p.y - center.y;
    if (dy > Rat(0)) return 0;
    if (dy < Rat(0)) return 1;
    return p.x - center.x > Rat(0) ? 0 : 1;
  };
  std::sort(found.begin(), found.end(), [&](const RatPoint &a, const RatPoint &b) {
    int ha = half(a), hb = half(b);
    if (ha != hb) return ha < hb;
    return detail::cross(center, a, b) > Rat(0);
  });

  auto start = std::min_element(found.begin(), found.end());
  std::rotate(found.begin(), start, found.end());
  return found;
}

// Indices of half-planes that are tight at no vertex. Such a constraint cuts
// nothing off the polygon formed by the others.
inline std::vector<int> redundant_constraints(const std::vector<HalfPlane> &planes,
                                              const std::vector<RatPoint> &verts) {
  std::vector<int> redundant;
  for (std::size_t i = 0; i < planes.size(); ++i) {
    bool tight = false;
    for (const auto &p : verts)
      if (planes[i].tight_at(p.x, p.y)) {
        tight = true;
        break;
      }
    if (!tight) redundant.push_back(static_cast<int>(i));
  }
  return redundant;
}

// Exact membership in the convex hull of a CCW vertex cycle. Degenerate
// hulls (a point or a segment) reduce to collinearity plus box checks.
inline bool hull_contains(const std::vector<RatPoint> &verts, const RatPoint &p) {
  if (verts.empty()) return false;
  if (verts.size() == 1) return verts[0] == p;
  if (verts.size() == 2) {
    if (detail::cross(verts[0], verts[1], p) != Rat(0)) return false;
    return rat_min(verts[0].x, verts[1].x) <= p.x && p.x <= rat_max(verts[0].x, verts[1].x) &&
           rat_min(verts[0].y, verts[1].y) <= p.y && p.y <= rat_max(verts[0].y, verts[1].y);
  }
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const RatPoint &a = verts[i];
    const RatPoint &b = verts[(i + 1) % verts.size()];
    if (detail::cross(a, b, p) < Rat(0)) return false;
  }
  return true;
}

}  // namespace aisbound
