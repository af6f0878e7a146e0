#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

namespace tofsim {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle to (-pi, pi].
inline double normalize_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }

/// Distance along the ray (origin, unit dir) to segment [a, b], or nullopt
/// if the ray misses. Hits behind the origin (t < eps) are ignored.
inline std::optional<double> ray_segment_intersection(const Vec2& origin, const Vec2& dir,
                                                      const Vec2& a, const Vec2& b,
                                                      double eps = 1e-9) {
  const Vec2 seg = b - a;
  const double denom = dir.cross(seg);
  if (std::abs(denom) < 1e-15) return std::nullopt;  // parallel
  const Vec2 delta = a - origin;
  const double t = delta.cross(seg) / denom;   // along ray
  const double u = delta.cross(dir) / denom;   // along segment
  if (t < eps || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

/// Euclidean distance from point p to segment [a, b].
inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 seg = b - a;
  const double len2 = seg.dot(seg);
  if (len2 <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(seg) / len2, 0.0, 1.0);
  return (p - (a + seg * t)).norm();
}

/// Distance from point p to an axis-aligned box footprint; 0 inside.
inline double point_box_distance(const Vec2& p, const Vec2& center, double half_x, double half_y) {
  const double dx = std::max(std::abs(p.x - center.x) - half_x, 0.0);
  const double dy = std::max(std::abs(p.y - center.y) - half_y, 0.0);
  return std::hypot(dx, dy);
}

}  // namespace tofsim
