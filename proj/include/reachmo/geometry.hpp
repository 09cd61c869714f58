#ifndef REACHMO_GEOMETRY_HPP
#define REACHMO_GEOMETRY_HPP

// Planar polygons: halfspace intersection, convex hulls and distances.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace reachmo {

using Point2 = Eigen::Vector2d;

/// n1 y1 + n2 y2 <= v + delta.
struct ProjectedHalfspace {
  double n1 = 0.0;
  double n2 = 0.0;
  double v = 0.0;
  double delta = 0.0;

  double rhs() const { return v + delta; }
  double slack(const Point2& y) const { return rhs() - (n1 * y[0] + n2 * y[1]); }
};

struct Polygon {
  std::vector<Point2> vertices;  ///< counter-clockwise
  bool empty = false;
  bool unbounded = false;
  Point2 ray = Point2::Zero();  ///< a recession direction when unbounded
  std::string diagnostic;
};

inline double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

/// Andrew's monotone chain; collinear points dropped, counter-clockwise.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point2> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0.0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

inline double polygon_area(const std::vector<Point2>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    a += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * std::abs(a);
}

inline double polygon_diameter(const std::vector<Point2>& v) {
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, (v[i] - v[j]).norm());
  return d;
}

/// Intersection of the halfspaces. Vertices are pairwise line intersections
/// satisfying every constraint within `slack`.
inline Polygon polygon_from_halfspaces(const std::vector<ProjectedHalfspace>& hs, double slack = 1e-9) {
  Polygon out;
  // Bounded iff the normals leave no angular gap of pi or more.
  std::vector<double> ang;
  for (const auto& h : hs)
    if (h.n1 != 0.0 || h.n2 != 0.0) ang.push_back(std::atan2(h.n2, h.n1));
  std::sort(ang.begin(), ang.end());
  if (ang.empty()) {
    out.unbounded = true;
    out.ray = Point2(1.0, 0.0);
    out.diagnostic = "no constraints";
    return out;
  }
  constexpr double pi = 3.14159265358979323846;
  for (std::size_t i = 0; i < ang.size(); ++i) {
    const double a = ang[i];
    const double b = i + 1 < ang.size() ? ang[i + 1] : ang[0] + 2.0 * pi;
    if (b - a >= pi - 1e-12) {
      const double mid = 0.5 * (a + b);
      out.unbounded = true;
      out.ray = Point2(std::cos(mid), std::sin(mid));
      out.diagnostic = "normals leave an angular gap of at least pi";
      return out;
    }
  }

  std::vector<Point2> pts;
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (std::size_t j = i + 1; j < hs.size(); ++j) {
      const double det = hs[i].n1 * hs[j].n2 - hs[i].n2 * hs[j].n1;
      const double scale = std::hypot(hs[i].n1, hs[i].n2) * std::hypot(hs[j].n1, hs[j].n2);
      if (std::abs(det) <= 1e-14 * scale) continue;
      const Point2 p((hs[i].rhs() * hs[j].n2 - hs[j].rhs() * hs[i].n2) / det,
                     (hs[i].n1 * hs[j].rhs() - hs[j].n1 * hs[i].rhs()) / det);
      bool ok = true;
      for (const auto& h : hs) {
        const double tol = slack * std::max(1.0, std::abs(h.rhs()));
        if (h.slack(p) < -tol) {
          ok = false;
          break;
        }
      }
      if (ok) pts.push_back(p);
    }
  if (pts.empty()) {
    out.empty = true;
    out.diagnostic = "empty intersection (over-tight constraints or numerical trouble)";
    return out;
  }
  out.vertices = convex_hull(pts);
  if (out.vertices.empty()) out.vertices = pts;
  return out;
}

/// Point in a convex counter-clockwise polygon, with absolute slack.
inline bool polygon_contains(const std::vector<Point2>& poly, const Point2& p, double slack = 1e-9) {
  if (poly.size() < 3) return false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % poly.size()];
    const double len = (b - a).norm();
    if (len == 0.0) continue;
    if (cross(a, b, p) / len < -slack) return false;
  }
  return true;
}

inline double segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 ab = b - a;
  const double L = ab.squaredNorm();
  const double t = L > 0.0 ? std::clamp((p - a).dot(ab) / L, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

/// Distance from a point to a convex polygon (0 inside).
inline double distance_to_polygon(const std::vector<Point2>& poly, const Point2& p) {
  if (poly.size() >= 3 && polygon_contains(poly, p, 0.0)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) d = std::min(d, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  if (poly.size() == 1) d = (p - poly[0]).norm();
  return d;
}

/// Hausdorff distance between convex polygons, attained at vertices.
inline double hausdorff_distance(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  double h = 0.0;
  for (const auto& p : a) h = std::max(h, distance_to_polygon(b, p));
  for (const auto& p : b) h = std::max(h, distance_to_polygon(a, p));
  return h;
}

}  // namespace reachmo

#endif  // REACHMO_GEOMETRY_HPP
