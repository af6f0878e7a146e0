#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tofsim/config.hpp"
#include "tofsim/policy.hpp"
#include "tofsim/scenario_types.hpp"
#include "tofsim/sensor.hpp"
#include "tofsim/state.hpp"
#include "tofsim/world.hpp"

namespace tofsim {

/// One explicit-Euler step: velocity and yaw rate move toward the command
/// under the acceleration clamps, then position/yaw/height integrate.
inline DroneState step_physics(const DroneState& state, const Command& cmd, double dt,
                               const SimConfig& cfg) {
  if (dt <= 0.0) throw std::domain_error("step_physics: dt must be positive");
  DroneState s = state;
  const double dv = std::clamp(cmd.v_forward - s.v_forward, cfg.a_min * dt, cfg.a_max * dt);
  s.v_forward += dv;
  const double dw = std::clamp(cmd.yaw_rate - s.yaw_rate, -cfg.yaw_accel_limit * dt,
                               cfg.yaw_accel_limit * dt);
  s.yaw_rate += dw;
  s.x += s.v_forward * std::cos(state.yaw) * dt;
  s.y += s.v_forward * std::sin(state.yaw) * dt;
  s.yaw = normalize_angle(s.yaw + s.yaw_rate * dt);
  s.v_vertical = std::clamp(cmd.v_vertical, -0.5, 0.5);
  s.height = std::max(0.0, s.height + s.v_vertical * dt);
  s.time_s += dt;
  return s;
}

/// True iff the collision disc intersects any wall or moving-obstacle
/// footprint whose height span overlaps the drone's height band.
inline bool check_collision(const DroneState& state, const World& world, const SimConfig& cfg) {
  const Vec2 p{state.x, state.y};
  const double z_lo = state.height - 0.02;
  const double z_hi = state.height + 0.02;
  for (const WallSegment& s : world.segments) {
    if (s.z_max < z_lo || s.z_min > z_hi) continue;
    if (point_segment_distance(p, s.a, s.b) <= cfg.collision_radius) return true;
  }
  for (const MovingObstacle& m : world.moving_obstacles) {
    if (m.z_max < z_lo || m.z_min > z_hi) continue;
    if (point_box_distance(p, m.position_at(state.time_s), m.half_x, m.half_y) <=
        cfg.collision_radius)
      return true;
  }
  return false;
}

enum class TerminalCause { Duration, Crash, Landed, OutOfBounds };

inline const char* to_string(TerminalCause c) {
  switch (c) {
    case TerminalCause::Duration: return "duration";
    case TerminalCause::Crash: return "crash";
    case TerminalCause::Landed: return "landed";
    case TerminalCause::OutOfBounds: return "out_of_bounds";
  }
  return "?";
}

/// State, frame digest and command at one control tick.
struct TraceTick {
  double time_s = 0.0;
  double x = 0.0;
  double y = 0.0;
  double height = 0.0;
  double yaw = 0.0;
  double v_forward = 0.0;
  double yaw_rate = 0.0;
  double v_vertical = 0.0;
  Mode mode = Mode::Cruise;
  int min_group_distance_mm = -1;
  std::uint64_t frame_digest = 0;
};

struct Trace {
  std::vector<TraceTick> ticks;
  TerminalCause cause = TerminalCause::Duration;
  std::optional<Vec2> crash_position;
  DroneState final_state;
  double collision_radius = 0.05;
};

struct RunMetrics {
  bool crashed = false;
  std::optional<Vec2> crash_position;
  double flight_time_s = 0.0;
  double distance_m = 0.0;
  double min_clearance_m = 0.0;
  std::optional<double> final_stop_distance_m;
  int turnarounds = 0;
};

namespace detail {

/// Planar distance to the nearest geometry whose height span overlaps the
/// drone's height band; +inf when nothing overlaps.
inline double geometry_distance(const World& world, double x, double y, double height,
                                double time_s) {
  const Vec2 p{x, y};
  const double z_lo = height - 0.02;
  const double z_hi = height + 0.02;
  double best = std::numeric_limits<double>::infinity();
  for (const WallSegment& s : world.segments) {
    if (s.z_max < z_lo || s.z_min > z_hi) continue;
    best = std::min(best, point_segment_distance(p, s.a, s.b));
  }
  for (const MovingObstacle& m : world.moving_obstacles) {
    if (m.z_max < z_lo || m.z_min > z_hi) continue;
    best = std::min(best, point_box_distance(p, m.position_at(time_s), m.half_x, m.half_y));
  }
  return best;
}

}  // namespace detail

/// Derives the evaluation metrics from a recorded trace.
inline RunMetrics compute_metrics(const Trace& trace, const World& world) {
  if (trace.ticks.empty()) throw std::domain_error("compute_metrics: empty trace");
  RunMetrics m;
  m.crashed = trace.cause == TerminalCause::Crash;
  m.crash_position = trace.crash_position;
  m.flight_time_s = trace.final_state.time_s;

  double dist = 0.0;
  double min_clear = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trace.ticks.size(); ++i) {
    const TraceTick& t = trace.ticks[i];
    if (i + 1 < trace.ticks.size()) {
      const TraceTick& n = trace.ticks[i + 1];
      dist += std::hypot(n.x - t.x, n.y - t.y);
    }
    min_clear = std::min(min_clear,
                         detail::geometry_distance(world, t.x, t.y, t.height, t.time_s) -
                             trace.collision_radius);
  }
  dist += std::hypot(trace.final_state.x - trace.ticks.back().x,
                     trace.final_state.y - trace.ticks.back().y);
  const double final_clear =
      detail::geometry_distance(world, trace.final_state.x, trace.final_state.y,
                                trace.final_state.height, trace.final_state.time_s) -
      trace.collision_radius;
  min_clear = std::min(min_clear, final_clear);
  m.distance_m = dist;
  m.min_clearance_m = std::isfinite(min_clear) ? min_clear : 0.0;
  if (!m.crashed) m.final_stop_distance_m = final_clear;

  Mode prev = Mode::Cruise;
  for (const TraceTick& t : trace.ticks) {
    if (t.mode == Mode::TurnAround && prev != Mode::TurnAround) ++m.turnarounds;
    prev = t.mode;
  }
  return m;
}

struct RunResult {
  Trace trace;
  RunMetrics metrics;
};

/// Closed loop at the sensor rate: raycast, corrupt, decide, integrate,
/// check. Fully deterministic for a given (scenario, seed).
inline RunResult run_scenario(const ScenarioConfig& scenario, std::uint64_t seed) {
  const RunConfig& cfg = scenario.config;
  validate(cfg);
  const double dt = 1.0 / cfg.sim.control_rate_hz;
  const double sub_dt = dt / cfg.sim.physics_substeps;

  Trace trace;
  trace.collision_radius = cfg.sim.collision_radius;
  RandomStream rng(seed);
  DroneState state = scenario.start;
  DeadEndHistory history;

  bool done = false;
  while (!done) {
    if (!scenario.world.bounds.contains({state.x, state.y})) {
      trace.cause = TerminalCause::OutOfBounds;
      break;
    }

    const IdealFrame ideal = raycast_frame(scenario.world, state, cfg.sensor);
    const DepthFrame frame = apply_noise(ideal, cfg.noise, cfg.sensor, rng,
                                         std::llround(state.time_s * 1000.0));
    DecideResult decision =
        decide(frame, state, std::move(history), state.time_s, cfg.policy, cfg.perception,
               cfg.sensor);
    history = std::move(decision.history);
    const Command& cmd = decision.command;

    trace.ticks.push_back({state.time_s, state.x, state.y, state.height, state.yaw,
                           state.v_forward, state.yaw_rate, state.v_vertical, cmd.mode,
                           decision.min_group_distance_mm, frame_digest(frame)});

    for (int i = 0; i < cfg.sim.physics_substeps; ++i) {
      state = step_physics(state, cmd, sub_dt, cfg.sim);
      if (check_collision(state, scenario.world, cfg.sim)) {
        trace.cause = TerminalCause::Crash;
        trace.crash_position = Vec2{state.x, state.y};
        done = true;
        break;
      }
    }
    if (done) break;

    if (cmd.mode == Mode::Land && state.height <= 0.01) {
      trace.cause = TerminalCause::Landed;
      break;
    }
    if (state.time_s >= cfg.sim.duration_s - 0.5 * sub_dt) {
      trace.cause = TerminalCause::Duration;
      break;
    }
  }

  trace.final_state = state;
  RunMetrics metrics = trace.ticks.empty() ? RunMetrics{} : compute_metrics(trace, scenario.world);
  return {std::move(trace), metrics};
}

}  // namespace tofsim
