#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tofsim/config.hpp"
#include "tofsim/perception.hpp"
#include "tofsim/sensor.hpp"
#include "tofsim/state.hpp"

namespace tofsim {

enum class ZoneKind { Ceiling, Ground, Danger, Caution, Periphery };

struct Zone {
  ZoneKind kind = ZoneKind::Periphery;
  Side side = Side::Left;
};

enum class Mode { Cruise, SlowSteer, StopSteer, Backward, HeightAdjust, TurnAround, Land };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::Cruise: return "Cruise";
    case Mode::SlowSteer: return "SlowSteer";
    case Mode::StopSteer: return "StopSteer";
    case Mode::Backward: return "Backward";
    case Mode::HeightAdjust: return "HeightAdjust";
    case Mode::TurnAround: return "TurnAround";
    case Mode::Land: return "Land";
  }
  return "?";
}

inline std::optional<Mode> mode_from_string(const std::string& s) {
  for (Mode m : {Mode::Cruise, Mode::SlowSteer, Mode::StopSteer, Mode::Backward,
                 Mode::HeightAdjust, Mode::TurnAround, Mode::Land})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

/// Policy output. Positive yaw_rate steers counterclockwise (left).
struct Command {
  double v_forward = 0.0;
  double yaw_rate = 0.0;
  double v_vertical = 0.0;
  Mode mode = Mode::Cruise;
};

/// Row rules take precedence over column rules; every pixel maps to exactly
/// one kind.
inline Zone classify_zone(int row, int col, const PolicyConfig& cfg) {
  if (row < 0 || row >= 8 || col < 0 || col >= 8)
    throw std::out_of_range("classify_zone: index out of range");
  Zone z;
  z.side = col <= 3 ? Side::Left : Side::Right;
  if (detail::contains(cfg.ceiling_rows, row))
    z.kind = ZoneKind::Ceiling;
  else if (detail::contains(cfg.ground_rows, row))
    z.kind = ZoneKind::Ground;
  else if (detail::contains(cfg.danger_cols, col))
    z.kind = ZoneKind::Danger;
  else if (detail::contains(cfg.caution_cols, col))
    z.kind = ZoneKind::Caution;
  else
    z.kind = ZoneKind::Periphery;
  return z;
}

/// Commanded forward velocity against the distance of the nearest obstacle.
/// Backward below d_fear, full stop in [d_fear, d_short), then a linear ramp
/// to v_fast at d_long; the danger ramp takes an intermediate value v_med at
/// d_med. Always clamped to v_max.
inline double forward_velocity(double d, ZoneKind zone_kind, const PolicyConfig& cfg) {
  if (d < 0.0) throw std::domain_error("forward_velocity: negative distance");
  if (zone_kind != ZoneKind::Danger && zone_kind != ZoneKind::Caution)
    throw std::invalid_argument("forward_velocity: zone must be Danger or Caution");
  double v = 0.0;
  if (d < cfg.d_fear) {
    v = cfg.v_back;
  } else if (d < cfg.d_short) {
    v = 0.0;
  } else if (d >= cfg.d_long) {
    v = cfg.v_fast;
  } else if (zone_kind == ZoneKind::Caution) {
    const double u = (d - cfg.d_short) / (cfg.d_long - cfg.d_short);
    v = cfg.v_slow + u * (cfg.v_fast - cfg.v_slow);
  } else if (d < cfg.d_med) {
    const double u = (d - cfg.d_short) / (cfg.d_med - cfg.d_short);
    v = cfg.v_slow + u * (cfg.v_med - cfg.v_slow);
  } else {
    const double u = (d - cfg.d_med) / (cfg.d_long - cfg.d_med);
    v = cfg.v_med + u * (cfg.v_fast - cfg.v_med);
  }
  return std::min(v, cfg.v_max);
}

/// Steering away from the obstacle side: fast rotation when close, slow when
/// far. Centered obstacles break the tie to the right (negative).
inline double steering_rate(Side side, double d, const PolicyConfig& cfg) {
  const double magnitude = d < cfg.d_med ? cfg.omega_fast : cfg.omega_slow;
  return side == Side::Right ? magnitude : -magnitude;
}

/// Vertical nudge when the nearest obstacle sits in the ceiling/ground band:
/// climb away from ground returns, descend away from ceiling returns.
inline double height_adjust(ZoneKind band, const PolicyConfig& cfg) {
  if (band == ZoneKind::Ground) return cfg.v_vertical;
  if (band == ZoneKind::Ceiling) return -cfg.v_vertical;
  throw std::invalid_argument("height_adjust: band must be Ceiling or Ground");
}

struct SteerEvent {
  int sign = 0;  // -1 or +1
  double time_s = 0.0;
  friend bool operator==(const SteerEvent&, const SteerEvent&) = default;
};

/// Oscillation memory for dead-end detection, threaded by value through the
/// decision loop.
struct DeadEndHistory {
  std::vector<SteerEvent> recent;  // alternating signs, newest last
  std::optional<double> turnaround_until_s;
  int turnaround_sign = -1;
};

/// Records steering sign changes, prunes entries older than the window, and
/// reports whether the flip count indicates a blocked path. On a trigger the
/// history is cleared and a 180-degree rotation at omega_fast is scheduled.
inline std::pair<DeadEndHistory, bool> update_deadend(DeadEndHistory history, int commanded_sign,
                                                      double now_s, const PolicyConfig& cfg) {
  if (commanded_sign != 0 &&
      (history.recent.empty() || history.recent.back().sign != commanded_sign))
    history.recent.push_back({commanded_sign, now_s});
  std::erase_if(history.recent,
                [&](const SteerEvent& e) { return e.time_s < now_s - cfg.deadend_window_s; });
  const bool trigger = cfg.omega_fast > 0.0 &&
                       static_cast<int>(history.recent.size()) >= cfg.deadend_flip_count;
  if (trigger) {
    history.recent.clear();
    history.turnaround_until_s = now_s + kPi / cfg.omega_fast;
  }
  return {std::move(history), trigger};
}

struct DecideResult {
  Command command;
  DeadEndHistory history;
  int min_group_distance_mm = -1;  // -1 when no group
};

namespace detail {

inline bool group_in_rows(const ObjectGroup& g, const std::vector<int>& rows) {
  for (const PixelCoord& p : g.pixels)
    if (!contains(rows, p.row)) return false;
  return true;
}

inline bool group_overlaps_reaction_zone(const ObjectGroup& g, const PolicyConfig& cfg,
                                         bool& any_danger) {
  bool overlaps = false;
  for (const PixelCoord& p : g.pixels) {
    const ZoneKind k = classify_zone(p.row, p.col, cfg).kind;
    if (k == ZoneKind::Danger) {
      any_danger = true;
      overlaps = true;
    } else if (k == ZoneKind::Caution) {
      overlaps = true;
    }
  }
  return overlaps;
}

}  // namespace detail

/// Full per-frame decision: battery check, turnaround continuation, feature
/// extraction, height adjustment, and the distance/zone reaction tables.
/// Pure in all arguments; the dead-end history travels by value.
inline DecideResult decide(const DepthFrame& frame, const DroneState& state,
                           DeadEndHistory history, double elapsed_s, const PolicyConfig& cfg,
                           const PerceptionConfig& pcfg, const SensorConfig& scfg) {
  DecideResult res;
  res.history = std::move(history);
  const double height_hold = 1.0 * (cfg.cruise_height - state.height);

  if (elapsed_s > cfg.battery_budget_s) {
    res.command = {0.0, 0.0, -cfg.v_vertical, Mode::Land};
    return res;
  }

  if (res.history.turnaround_until_s && elapsed_s < *res.history.turnaround_until_s) {
    res.command = {0.0, res.history.turnaround_sign * cfg.omega_fast, height_hold,
                   Mode::TurnAround};
    return res;
  }
  res.history.turnaround_until_s.reset();

  const OccupancyFrame occupancy = threshold(frame, pcfg);
  const std::vector<ObjectGroup> groups = group(occupancy, frame, pcfg);
  if (!groups.empty()) res.min_group_distance_mm = groups.front().min_distance_mm;

  Command cmd{cfg.v_max, 0.0, height_hold, Mode::Cruise};
  if (!groups.empty()) {
    const ObjectGroup& closest = groups.front();
    const double closest_d = closest.min_distance_mm / 1000.0;
    const bool ceiling = detail::group_in_rows(closest, cfg.ceiling_rows);
    const bool ground = detail::group_in_rows(closest, cfg.ground_rows);
    if ((ceiling || ground) && closest_d < cfg.d_vert) {
      cmd.v_forward = std::min(cfg.v_slow, cfg.v_max);
      cmd.v_vertical = height_adjust(ceiling ? ZoneKind::Ceiling : ZoneKind::Ground, cfg);
      cmd.mode = Mode::HeightAdjust;
    } else {
      const ObjectGroup* reacting = nullptr;
      bool any_danger = false;
      for (const ObjectGroup& g : groups) {
        bool danger_here = false;
        if (detail::group_overlaps_reaction_zone(g, cfg, danger_here)) {
          reacting = &g;
          any_danger = danger_here;
          break;  // groups are ordered nearest-first
        }
      }
      if (reacting) {
        const double d = reacting->min_distance_mm / 1000.0;
        const ZoneKind kind = any_danger ? ZoneKind::Danger : ZoneKind::Caution;
        cmd.v_forward = forward_velocity(d, kind, cfg);
        cmd.yaw_rate = steering_rate(group_features(*reacting, scfg).side, d, cfg);
        cmd.mode = cmd.v_forward < 0.0  ? Mode::Backward
                   : cmd.v_forward == 0.0 ? Mode::StopSteer
                                          : Mode::SlowSteer;
      }
    }
  }

  const int steer_sign = cmd.yaw_rate > 0.0 ? 1 : cmd.yaw_rate < 0.0 ? -1 : 0;
  auto [updated, turnaround] = update_deadend(std::move(res.history), steer_sign, elapsed_s, cfg);
  res.history = std::move(updated);
  if (turnaround)
    cmd = {0.0, res.history.turnaround_sign * cfg.omega_fast, height_hold, Mode::TurnAround};
  res.command = cmd;
  return res;
}

/// Lateral extent of a column band at distance d, by arc length of the band's
/// angular span (columns min..max inclusive).
inline double zone_band_width_m(const std::vector<int>& cols, double distance_m,
                                const SensorConfig& cfg) {
  if (cols.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(cols.begin(), cols.end());
  const int span = *hi - *lo + 1;
  return distance_m * span * (cfg.fov_h_rad() / cfg.cols);
}

}  // namespace tofsim
