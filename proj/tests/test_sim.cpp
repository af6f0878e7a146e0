#include <catch2/catch_amalgamated.hpp>

#include "tofsim/io.hpp"
#include "tofsim/scenario.hpp"
#include "tofsim/sim.hpp"

using namespace tofsim;

TEST_CASE("acceleration clamp limits the velocity step") {
  const SimConfig cfg;
  DroneState s;
  Command cmd;
  cmd.v_forward = 1.0;
  const DroneState next = step_physics(s, cmd, 1.0 / 15.0, cfg);
  CHECK(next.v_forward == Catch::Approx(0.1));  // 1.5 / 15
  CHECK(next.time_s == Catch::Approx(1.0 / 15.0));
}

TEST_CASE("the braking clamp can shed 2 m/s in 0.1 s") {
  const SimConfig cfg;
  DroneState s;
  s.v_forward = 2.0;
  Command stop;
  const DroneState next = step_physics(s, stop, 0.1, cfg);
  CHECK(next.v_forward == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("zero command leaves the state untouched except for time") {
  const SimConfig cfg;
  DroneState s;
  s.x = 1.0;
  s.y = -2.0;
  s.height = 0.4;
  s.yaw = 0.3;
  const DroneState next = step_physics(s, Command{}, 0.05, cfg);
  CHECK(next.x == s.x);
  CHECK(next.y == s.y);
  CHECK(next.height == s.height);
  CHECK(next.yaw == s.yaw);
  CHECK(next.v_forward == 0.0);
  CHECK(next.time_s == Catch::Approx(0.05));
}

TEST_CASE("yaw rate tracks the command through the rate limiter") {
  const SimConfig cfg;  // yaw accel limit 8 rad/s^2
  DroneState s;
  Command cmd;
  cmd.yaw_rate = 1.0;
  const DroneState next = step_physics(s, cmd, 1.0 / 15.0, cfg);
  CHECK(next.yaw_rate == Catch::Approx(8.0 / 15.0));
  CHECK(next.yaw == Catch::Approx((8.0 / 15.0) / 15.0));
}

TEST_CASE("vertical velocity is clamped and height stays non-negative") {
  const SimConfig cfg;
  DroneState s;
  s.height = 0.01;
  Command cmd;
  cmd.v_vertical = -2.0;
  const DroneState next = step_physics(s, cmd, 0.1, cfg);
  CHECK(next.v_vertical == -0.5);
  CHECK(next.height == 0.0);
  CHECK_THROWS_AS(step_physics(s, cmd, 0.0, cfg), std::domain_error);
}

TEST_CASE("velocity never overshoots the commanded value") {
  const SimConfig cfg;
  DroneState s;
  Command cmd;
  cmd.v_forward = 0.85;
  for (int i = 0; i < 200; ++i) {
    s = step_physics(s, cmd, 1.0 / 150.0, cfg);
    CHECK(s.v_forward <= cmd.v_forward + 1e-12);
  }
  CHECK(s.v_forward == Catch::Approx(0.85));
}

TEST_CASE("collision tests respect radius and height span") {
  SimConfig cfg;  // radius 0.05
  World w;
  w.segments.push_back({{1.0, -1.0}, {1.0, 1.0}, 0.0, 2.0, SurfaceClass::Matte});
  DroneState s;
  s.height = 0.4;

  s.x = 0.0;
  CHECK_FALSE(check_collision(s, w, cfg));
  s.x = 0.97;  // 0.03 < 0.05
  CHECK(check_collision(s, w, cfg));

  // obstacle spanning z in [0.6, 0.8] does not touch a drone at 0.4
  w.segments[0].z_min = 0.6;
  w.segments[0].z_max = 0.8;
  CHECK_FALSE(check_collision(s, w, cfg));
  s.height = 0.65;
  CHECK(check_collision(s, w, cfg));
}

TEST_CASE("moving obstacle footprints collide at the sampled time") {
  SimConfig cfg;
  World w;
  MovingObstacle m;
  m.half_x = 0.25;
  m.half_y = 0.25;
  m.z_min = 0.0;
  m.z_max = 1.8;
  m.waypoints = {{0.0, {5.0, 0.0}}, {1.0, {1.0, 0.0}}};
  w.moving_obstacles.push_back(m);
  DroneState s;
  s.height = 0.4;
  s.x = 1.0;
  s.time_s = 0.0;
  CHECK_FALSE(check_collision(s, w, cfg));
  s.time_s = 1.0;
  CHECK(check_collision(s, w, cfg));
}

TEST_CASE("compute_metrics integrates distance and clearance") {
  World w;
  w.segments.push_back({{10.0, -1.0}, {10.0, 1.0}, 0.0, 2.0, SurfaceClass::Matte});
  Trace t;
  t.collision_radius = 0.05;
  for (int i = 0; i <= 135; ++i) {
    TraceTick tick;
    tick.time_s = i / 15.0;
    tick.x = 1.0 * tick.time_s;  // 1 m/s straight line, stops at x = 9
    tick.height = 0.4;
    t.ticks.push_back(tick);
  }
  t.final_state.x = t.ticks.back().x;
  t.final_state.height = 0.4;
  t.final_state.time_s = t.ticks.back().time_s;
  t.cause = TerminalCause::Duration;
  const RunMetrics m = compute_metrics(t, w);
  CHECK(m.flight_time_s == Catch::Approx(9.0));
  CHECK(m.distance_m == Catch::Approx(9.0).margin(1e-9));
  CHECK(m.min_clearance_m == Catch::Approx(10.0 - 9.0 - 0.05));
  CHECK_FALSE(m.crashed);
  REQUIRE(m.final_stop_distance_m.has_value());
  CHECK(*m.final_stop_distance_m == Catch::Approx(0.95));

  Trace empty;
  CHECK_THROWS_AS(compute_metrics(empty, w), std::domain_error);
}

TEST_CASE("stationary trace covers zero distance") {
  World w;
  w.segments.push_back({{2.0, -1.0}, {2.0, 1.0}, 0.0, 2.0, SurfaceClass::Matte});
  Trace t;
  for (int i = 0; i <= 150; ++i) {
    TraceTick tick;
    tick.time_s = i / 15.0;
    tick.x = 0.0;
    tick.height = 0.4;
    t.ticks.push_back(tick);
  }
  t.final_state.time_s = 10.0;
  const RunMetrics m = compute_metrics(t, w);
  CHECK(m.distance_m == 0.0);
  CHECK(m.flight_time_s == Catch::Approx(10.0));
  CHECK(m.min_clearance_m == Catch::Approx(1.95));
}

TEST_CASE("scenario builders produce the documented geometry") {
  const ScenarioConfig pipe = make_scenario("pipe", {{"width", 0.55}});
  int pipe_walls = 0;
  for (const WallSegment& s : pipe.world.segments)
    if (s.a.y == s.b.y && std::abs(s.a.y) == Catch::Approx(0.275) &&
        std::abs(s.b.x - s.a.x) == Catch::Approx(4.0))
      ++pipe_walls;
  CHECK(pipe_walls == 2);

  const ScenarioConfig wall = make_scenario("wall_brake", {{"v_max", 2.5}});
  CHECK(wall.config.policy.v_max == 2.5);
  CHECK(wall.config.policy.omega_fast == 0.0);  // braking is evaluated with steering disabled
  bool has_panel = false;
  for (const WallSegment& s : wall.world.segments)
    if (s.a.x == 3.5 && s.b.x == 3.5 && s.z_max == Catch::Approx(1.3)) has_panel = true;
  CHECK(has_panel);
  CHECK(wall.start.x == 0.0);

  const ScenarioConfig dead = make_scenario("deadend", {{"depth", 2.0}, {"width", 1.0}});
  int corridor_walls = 0;
  for (const WallSegment& s : dead.world.segments)
    if (std::abs(s.a.y) == Catch::Approx(0.5) || std::abs(s.b.y) == Catch::Approx(0.5))
      ++corridor_walls;
  CHECK(corridor_walls >= 3);

  CHECK_THROWS_AS(make_scenario("pipe", {}), ConfigError);            // width required
  CHECK_THROWS_AS(make_scenario("no_such_kind", {}), ConfigError);             // unknown kind
  CHECK_THROWS_AS(make_scenario("pipe", {{"width", 0.55}, {"bogus", 1.0}}), ConfigError);
  CHECK_THROWS_AS(make_scenario("dynamic_person", {{"person_speed", -1.0}}), ConfigError);
}

TEST_CASE("scenario JSON round trip") {
  const ScenarioConfig sc = make_scenario("dynamic_person", {{"v_max", 1.5}});
  const json j = to_json(sc);
  const ScenarioConfig back = scenario_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.world.moving_obstacles.size() == 1);
  CHECK(back.config.policy.v_max == 1.5);
}

TEST_CASE("scenario JSON validation errors name the field") {
  json j = to_json(make_scenario("open_room"));
  j["world"]["segments"][0]["z_min"] = 5.0;
  CHECK_THROWS_AS(scenario_from_json(j), ConfigError);
  json k = to_json(make_scenario("open_room"));
  k["start"]["x"] = 100.0;  // outside bounds
  CHECK_THROWS_AS(scenario_from_json(k), ConfigError);
  json m = to_json(make_scenario("open_room"));
  m["world"]["wat"] = 1;
  CHECK_THROWS_AS(scenario_from_json(m), ConfigError);
}

TEST_CASE("runs are deterministic: same scenario and seed, same bytes") {
  // noisy braking run so the seed actually enters the pipeline
  const ScenarioConfig sc = make_scenario("wall_brake", {{"ideal", 0.0}, {"duration_s", 6.0}});
  const RunResult a = run_scenario(sc, 17);
  const RunResult b = run_scenario(sc, 17);
  CHECK(trace_to_csv(a.trace) == trace_to_csv(b.trace));
  CHECK(metrics_to_json(a.metrics, a.trace.cause).dump() ==
        metrics_to_json(b.metrics, b.trace.cause).dump());
  const RunResult c = run_scenario(sc, 18);
  CHECK(trace_to_csv(a.trace) != trace_to_csv(c.trace));
}

TEST_CASE("leaving the bounds terminates the run") {
  ScenarioConfig sc;
  sc.kind = "custom";
  sc.world.bounds = {-1.0, -1.0, 2.0, 1.0};
  sc.start = {0.0, 0.0, 0.4, 0.0};
  sc.config.sim.duration_s = 10.0;
  const RunResult r = run_scenario(sc, 0);
  CHECK(r.trace.cause == TerminalCause::OutOfBounds);
  CHECK(r.trace.final_state.x > 2.0);
  CHECK_FALSE(r.metrics.crashed);
}

TEST_CASE("a crash terminates the run with the crash position") {
  ScenarioConfig sc;
  sc.kind = "custom";
  sc.world.bounds = {-1.0, -1.0, 3.0, 1.0};
  // reflective wall at a steep angle stays invisible, so the drone plows in
  sc.world.segments.push_back({{0.4, -1.0}, {2.4, 1.0}, 0.0, 2.0, SurfaceClass::Reflective});
  sc.start = {0.0, 0.0, 0.4, 0.0};
  sc.config.sim.duration_s = 10.0;
  const RunResult r = run_scenario(sc, 0);
  CHECK(r.trace.cause == TerminalCause::Crash);
  CHECK(r.metrics.crashed);
  REQUIRE(r.metrics.crash_position.has_value());
  CHECK(r.metrics.min_clearance_m <= 0.001);
}

TEST_CASE("min clearance is strictly positive in a crash-free run") {
  const ScenarioConfig sc = make_scenario("wall_brake", {{"v_max", 1.0}});
  const RunResult r = run_scenario(sc, 4);
  REQUIRE_FALSE(r.metrics.crashed);
  CHECK(r.metrics.min_clearance_m > 0.0);
  CHECK(r.metrics.turnarounds == 0);
}

TEST_CASE("trace CSV has the documented schema") {
  const ScenarioConfig sc = make_scenario("open_room", {{"duration_s", 1.0}});
  const RunResult r = run_scenario(sc, 1);
  const std::string csv = trace_to_csv(r.trace);
  CHECK(csv.rfind("time_s,x,y,height,yaw,v_forward,yaw_rate,v_vertical,mode,"
                  "min_group_distance_mm\n", 0) == 0);
  const auto lines = io::split_lines(csv);
  CHECK(lines.size() == r.trace.ticks.size() + 1);
  CHECK(io::split_csv_line(lines[1]).size() == 10);
}
