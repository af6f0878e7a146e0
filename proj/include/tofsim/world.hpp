#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tofsim/geometry.hpp"

namespace tofsim {

enum class SurfaceClass { Matte, Reflective };

inline const char* to_string(SurfaceClass s) {
  return s == SurfaceClass::Matte ? "matte" : "reflective";
}

inline SurfaceClass surface_from_string(const std::string& s) {
  if (s == "matte") return SurfaceClass::Matte;
  if (s == "reflective") return SurfaceClass::Reflective;
  throw std::invalid_argument("unknown surface class: " + s);
}

/// Vertical wall: a 2-D segment extruded over [z_min, z_max].
struct WallSegment {
  Vec2 a;
  Vec2 b;
  double z_min = 0.0;
  double z_max = 2.0;
  SurfaceClass surface = SurfaceClass::Matte;
};

struct Waypoint {
  double time_s = 0.0;
  Vec2 pos;
};

/// Axis-aligned box following a piecewise-linear waypoint schedule.
struct MovingObstacle {
  double half_x = 0.25;
  double half_y = 0.25;
  double z_min = 0.0;
  double z_max = 1.8;
  SurfaceClass surface = SurfaceClass::Matte;
  std::vector<Waypoint> waypoints;

  Vec2 position_at(double t) const {
    if (waypoints.empty()) return {};
    if (t <= waypoints.front().time_s) return waypoints.front().pos;
    if (t >= waypoints.back().time_s) return waypoints.back().pos;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
      if (t <= waypoints[i].time_s) {
        const Waypoint& w0 = waypoints[i - 1];
        const Waypoint& w1 = waypoints[i];
        const double u = (t - w0.time_s) / (w1.time_s - w0.time_s);
        return w0.pos + (w1.pos - w0.pos) * u;
      }
    }
    return waypoints.back().pos;
  }

  /// Footprint edges at time t, CCW order.
  std::array<std::pair<Vec2, Vec2>, 4> edges_at(double t) const {
    const Vec2 c = position_at(t);
    const Vec2 p0{c.x - half_x, c.y - half_y};
    const Vec2 p1{c.x + half_x, c.y - half_y};
    const Vec2 p2{c.x + half_x, c.y + half_y};
    const Vec2 p3{c.x - half_x, c.y + half_y};
    return {{{p0, p1}, {p1, p2}, {p2, p3}, {p3, p0}}};
  }
};

struct Bounds {
  double min_x = -10.0;
  double min_y = -10.0;
  double max_x = 10.0;
  double max_y = 10.0;

  bool contains(const Vec2& p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
};

struct World {
  std::vector<WallSegment> segments;
  std::vector<MovingObstacle> moving_obstacles;
  Bounds bounds;
};

}  // namespace tofsim
