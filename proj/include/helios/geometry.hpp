#pragma once

// Small vector types and simple-polygon utilities for planar apertures.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "helios/errors.hpp"

namespace helios {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

using Polygon = std::vector<Vec2>;
using Triangle = std::array<Vec2, 3>;

/// Signed area (positive for counter-clockwise vertex order).
inline double signed_area(const Polygon& p) {
  double a = 0.0;
  for (std::size_t i = 0, n = p.size(); i < n; ++i) a += cross(p[i], p[(i + 1) % n]);
  return 0.5 * a;
}

inline double polygon_diameter(const Polygon& p) {
  double d = 0.0;
  for (const auto& a : p)
    for (const auto& b : p) d = std::max(d, norm(a - b));
  return d;
}

inline double point_segment_distance(Vec2 q, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? std::clamp(dot(q - a, ab) / len2, 0.0, 1.0) : 0.0;
  return norm(q - (a + t * ab));
}

/// Distance from q to the polygon boundary (min over edges).
inline double boundary_distance(const Polygon& p, Vec2 q) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, n = p.size(); i < n; ++i) d = std::min(d, point_segment_distance(q, p[i], p[(i + 1) % n]));
  return d;
}

/// Even-odd crossing test; points on the boundary may land on either side.
inline bool contains(const Polygon& p, Vec2 q) {
  bool inside = false;
  for (std::size_t i = 0, n = p.size(), j = n - 1; i < n; j = i++) {
    const Vec2& a = p[i];
    const Vec2& b = p[j];
    if ((a.y > q.y) != (b.y > q.y)) {
      double x = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (q.x < x) inside = !inside;
    }
  }
  return inside;
}

namespace detail {

inline int orientation(Vec2 a, Vec2 b, Vec2 c, double eps) {
  double v = cross(b - a, c - a);
  if (v > eps) return 1;
  if (v < -eps) return -1;
  return 0;
}

inline bool on_segment(Vec2 a, Vec2 b, Vec2 q) {
  return std::min(a.x, b.x) <= q.x && q.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= q.y &&
         q.y <= std::max(a.y, b.y);
}

inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double eps) {
  int o1 = orientation(a, b, c, eps), o2 = orientation(a, b, d, eps);
  int o3 = orientation(c, d, a, eps), o4 = orientation(c, d, b, eps);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

inline bool in_triangle(Vec2 q, Vec2 a, Vec2 b, Vec2 c, double eps) {
  return cross(b - a, q - a) >= -eps && cross(c - b, q - b) >= -eps && cross(a - c, q - c) >= -eps;
}

}  // namespace detail

/// Drops a repeated closing vertex, validates simplicity and returns the
/// polygon in counter-clockwise order.
inline Polygon normalized_polygon(Polygon p) {
  if (p.size() >= 2) {
    const Vec2 d = p.front() - p.back();
    if (d.x == 0.0 && d.y == 0.0) p.pop_back();
  }
  if (p.size() < 3) throw DegeneratePolygon("polygon needs at least 3 vertices");
  const double scale = std::max(polygon_diameter(p), 1e-300);
  const double eps = 1e-13 * scale * scale;
  const double area = signed_area(p);
  if (!(std::abs(area) > eps)) throw DegeneratePolygon("polygon has zero area");
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (norm(p[i] - p[(i + 1) % n]) <= 1e-14 * scale) throw DegeneratePolygon("polygon has repeated vertices");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (detail::segments_intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n], eps)) {
        throw DegeneratePolygon("polygon is self-intersecting (edges " + std::to_string(i) + " and " +
                                std::to_string(j) + ")");
      }
    }
  }
  if (area < 0.0) std::reverse(p.begin(), p.end());
  return p;
}

/// Ear-clipping triangulation of a simple counter-clockwise polygon. Among
/// the available ears the one whose apex has the smallest original vertex
/// index is clipped first.
inline std::vector<Triangle> triangulate(const Polygon& poly) {
  const double scale = polygon_diameter(poly);
  const double eps = 1e-13 * scale * scale;
  std::vector<std::size_t> idx(poly.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<Triangle> tris;
  while (idx.size() > 3) {
    const std::size_t m = idx.size();
    std::size_t best = m;
    std::size_t collinear = m;
    for (std::size_t pos = 0; pos < m; ++pos) {
      const Vec2 a = poly[idx[(pos + m - 1) % m]], b = poly[idx[pos]], c = poly[idx[(pos + 1) % m]];
      double turn = cross(b - a, c - b);
      if (std::abs(turn) <= eps) {
        if (collinear == m || idx[pos] < idx[collinear]) collinear = pos;
        continue;
      }
      if (turn < 0.0) continue;
      bool empty = true;
      for (std::size_t other = 0; other < m && empty; ++other) {
        if (other == pos || other == (pos + 1) % m || other == (pos + m - 1) % m) continue;
        if (detail::in_triangle(poly[idx[other]], a, b, c, eps)) empty = false;
      }
      if (empty && (best == m || idx[pos] < idx[best])) best = pos;
    }
    if (best == m) {
      if (collinear == m) throw DegeneratePolygon("ear clipping found no ear");
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(collinear));
      continue;
    }
    tris.push_back({poly[idx[(best + m - 1) % m]], poly[idx[best]], poly[idx[(best + 1) % m]]});
    idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(best));
  }
  const Vec2 a = poly[idx[0]], b = poly[idx[1]], c = poly[idx[2]];
  if (std::abs(cross(b - a, c - a)) > eps) tris.push_back({a, b, c});
  return tris;
}

/// Area of {q in M : dist(q, boundary) >= d} for a convex polygon M, computed
/// by clipping M against each edge's inward offset half-plane.
inline double convex_eroded_area(const Polygon& ccw, double d) {
  Polygon cur = ccw;
  const std::size_t n = ccw.size();
  for (std::size_t e = 0; e < n && !cur.empty(); ++e) {
    Vec2 a = ccw[e], b = ccw[(e + 1) % n];
    Vec2 t = (1.0 / norm(b - a)) * (b - a);
    Vec2 inward{-t.y, t.x};
    auto side = [&](Vec2 q) { return dot(q - a, inward) - d; };
    Polygon next;
    for (std::size_t i = 0, m = cur.size(); i < m; ++i) {
      Vec2 p = cur[i], q = cur[(i + 1) % m];
      double sp = side(p), sq = side(q);
      if (sp >= 0.0) next.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) next.push_back(p + (sp / (sp - sq)) * (q - p));
    }
    cur = std::move(next);
  }
  return cur.size() >= 3 ? std::abs(signed_area(cur)) : 0.0;
}

inline bool is_convex(const Polygon& ccw) {
  for (std::size_t i = 0, n = ccw.size(); i < n; ++i) {
    if (cross(ccw[(i + 1) % n] - ccw[i], ccw[(i + 2) % n] - ccw[(i + 1) % n]) < 0.0) return false;
  }
  return true;
}

}  // namespace helios
