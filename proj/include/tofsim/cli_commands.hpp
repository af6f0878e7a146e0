#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tofsim/dataset.hpp"
#include "tofsim/io.hpp"
#include "tofsim/scenario.hpp"
#include "tofsim/sim.hpp"

namespace tofsim {

namespace detail {

inline json parse_json_file(const std::filesystem::path& path) {
  const std::string text = io::read_text_file(path);
  return json::parse(text);  // throws json::parse_error with position info
}

/// Right-biased recursive merge: values from `over` win, objects merge.
inline json deep_merge(json base, const json& over) {
  if (!base.is_object() || !over.is_object()) return over;
  for (auto it = over.begin(); it != over.end(); ++it) {
    if (base.contains(it.key()))
      base[it.key()] = deep_merge(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
  return base;
}

inline int report_error(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  return 1;
}

}  // namespace detail

struct SimulateArgs {
  std::string scenario_path;  // JSON file; mutually exclusive with kind
  std::string kind;           // built-in scenario name
  ScenarioParams params;
  std::string config_path;  // optional RunConfig overlay
  std::optional<double> v_max;
  std::uint64_t seed = 0;
  std::string out_dir;
};

inline ScenarioConfig resolve_scenario(const SimulateArgs& args) {
  ScenarioConfig sc;
  if (!args.scenario_path.empty()) {
    sc = scenario_from_json(detail::parse_json_file(args.scenario_path));
  } else if (!args.kind.empty()) {
    // v_max participates in scenario construction (the dynamic obstacle
    // schedule depends on the approach profile), so thread it through as a
    // builder parameter rather than patching the config afterwards.
    ScenarioParams params = args.params;
    if (args.v_max) params["v_max"] = *args.v_max;
    sc = make_scenario(args.kind, params);
  } else {
    throw ConfigError("scenario", "either a scenario file or a kind is required");
  }
  if (!args.config_path.empty()) {
    const json merged =
        detail::deep_merge(to_json(sc.config), detail::parse_json_file(args.config_path));
    sc.config = run_config_from_json(merged);
  }
  if (args.v_max) {
    sc.config.policy.v_max = *args.v_max;
    validate(sc.config);
  }
  return sc;
}

/// Runs one scenario and writes trace.csv, metrics.json, resolved_config.json.
/// Exit 0 on clean completion (including a commanded landing), 1 on config
/// errors, 2 when the run ended in a crash.
inline int cmd_simulate(const SimulateArgs& args) {
  ScenarioConfig sc;
  try {
    sc = resolve_scenario(args);
    if (args.out_dir.empty()) throw ConfigError("out", "output directory is required");
  } catch (const std::exception& e) {
    return detail::report_error(e);
  }

  const RunResult result = run_scenario(sc, args.seed);

  try {
    std::filesystem::create_directories(args.out_dir);
    const std::filesystem::path out(args.out_dir);
    io::write_text_file(out / "trace.csv", trace_to_csv(result.trace));
    io::write_text_file(out / "metrics.json",
                        metrics_to_json(result.metrics, result.trace.cause).dump(2) + "\n");
    json resolved;
    resolved["seed"] = args.seed;
    resolved["scenario"] = to_json(sc);
    io::write_text_file(out / "resolved_config.json", resolved.dump(2) + "\n");
  } catch (const std::exception& e) {
    return detail::report_error(e);
  }

  if (result.trace.cause == TerminalCause::Crash) {
    std::cerr << "run ended in a crash at ("
              << io::format_double(result.trace.crash_position->x, 3) << ", "
              << io::format_double(result.trace.crash_position->y, 3) << ")\n";
    return 2;
  }
  return 0;
}

struct SweepArgs {
  std::string kind;
  ScenarioParams params;
  std::string config_path;
  std::vector<double> v_max_list;
  int trials = 1;
  std::uint64_t base_seed = 0;
  int jobs = 1;
  std::string out_path;
};

/// Runs trials x |v_max_list| independent scenarios (per-trial seeds
/// base_seed + trial) and writes one aggregate CSV row per v_max, sorted
/// ascending. Workers only fill a preallocated table, so the output bytes do
/// not depend on the degree of parallelism.
inline int cmd_sweep(const SweepArgs& args) {
  std::vector<ScenarioConfig> scenarios;
  std::vector<double> v_list = args.v_max_list;
  try {
    if (args.trials < 1) throw ConfigError("trials", "must be >= 1");
    if (v_list.empty()) throw ConfigError("v_max", "at least one value is required");
    if (args.out_path.empty()) throw ConfigError("out", "output path is required");
    std::sort(v_list.begin(), v_list.end());
    for (double v : v_list) {
      SimulateArgs sim_args;
      sim_args.kind = args.kind;
      sim_args.params = args.params;
      sim_args.config_path = args.config_path;
      sim_args.v_max = v;
      scenarios.push_back(resolve_scenario(sim_args));
    }
  } catch (const std::exception& e) {
    return detail::report_error(e);
  }

  const int n_v = static_cast<int>(v_list.size());
  std::vector<std::vector<RunMetrics>> table(n_v, std::vector<RunMetrics>(args.trials));
  const int total = n_v * args.trials;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int task = next.fetch_add(1); task < total; task = next.fetch_add(1)) {
      const int iv = task / args.trials;
      const int trial = task % args.trials;
      table[iv][trial] =
          run_scenario(scenarios[iv], args.base_seed + static_cast<std::uint64_t>(trial)).metrics;
    }
  };
  const int jobs = std::max(1, args.jobs);
  std::vector<std::thread> threads;
  for (int i = 1; i < jobs; ++i) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();

  std::string csv = "v_max,trials,crashes,mean_flight_time_s,mean_distance_m,mean_min_clearance_m\n";
  for (int iv = 0; iv < n_v; ++iv) {
    int crashes = 0;
    double sum_time = 0.0, sum_dist = 0.0, sum_clear = 0.0;
    for (const RunMetrics& m : table[iv]) {
      crashes += m.crashed ? 1 : 0;
      sum_time += m.flight_time_s;
      sum_dist += m.distance_m;
      sum_clear += m.min_clearance_m;
    }
    csv += io::format_double(v_list[iv], 3) + ',' + std::to_string(args.trials) + ',' +
           std::to_string(crashes) + ',' + io::format_double(sum_time / args.trials) + ',' +
           io::format_double(sum_dist / args.trials) + ',' +
           io::format_double(sum_clear / args.trials) + '\n';
  }
  try {
    io::write_text_file(args.out_path, csv);
  } catch (const std::exception& e) {
    return detail::report_error(e);
  }
  return 0;
}

struct ReplayArgs {
  std::string log_dir;
  std::string config_path;
  std::string out_path;
};

/// Replays a recorded ToF stream through perception + policy, one command
/// per frame, written in the commands.csv schema.
inline int cmd_replay(const ReplayArgs& args) {
  try {
    RunConfig cfg;
    if (!args.config_path.empty())
      cfg = run_config_from_json(detail::parse_json_file(args.config_path));
    if (args.out_path.empty()) throw ConfigError("out", "output path is required");
    const LogBundle bundle = read_log(args.log_dir, cfg.sensor);
    const std::vector<TimedCommand> commands =
        replay(bundle, cfg.perception, cfg.policy, cfg.sensor);
    std::string csv = std::string(detail::kCommandsCsvHeader) + "\n";
    for (const TimedCommand& c : commands) {
      csv += std::to_string(c.timestamp_ms) + ',' + io::format_double_exact(c.command.v_forward) +
             ',' + io::format_double_exact(c.command.yaw_rate) + ',' +
             io::format_double_exact(c.command.v_vertical) + ',' + to_string(c.command.mode) +
             '\n';
    }
    io::write_text_file(args.out_path, csv);
  } catch (const std::exception& e) {
    return detail::report_error(e);
  }
  return 0;
}

struct CharacterizeArgs {
  std::string config_path;
  std::vector<double> distances_m;
  int samples = 1000;
  std::string out_path;
};

struct CharacterizeRow {
  double distance_m = 0.0;
  Grid8 mean_err_mm{};
  Grid8 sigma_mm{};
  double validity = 0.0;
};

/// Monte-Carlo of the sensor model against a frontal flat wall: per-pixel
/// mean error and sigma over the valid samples, plus the valid fraction.
inline std::vector<CharacterizeRow> characterize_model(const RunConfig& cfg,
                                                       const std::vector<double>& distances_m,
                                                       int samples) {
  if (samples < 1) throw ConfigError("samples", "must be >= 1");
  std::vector<CharacterizeRow> rows;
  RandomStream rng(cfg.noise.rng_seed);
  for (double d : distances_m) {
    if (d <= 0.0) throw ConfigError("distances", "must be positive");
    World world;
    const double reach = d * std::tan(cfg.sensor.fov_h_rad() / 2.0) + 1.0;
    world.segments.push_back({{d, -reach}, {d, reach}, -10.0, 10.0, SurfaceClass::Matte});
    world.bounds = {-1.0, -reach, d + 1.0, reach};
    DroneState pose;
    pose.height = 1.0;  // bench height used for the static sweep
    const IdealFrame ideal = raycast_frame(world, pose, cfg.sensor);

    CharacterizeRow row;
    row.distance_m = d;
    Grid8 sum{}, sum_sq{};
    std::array<std::array<int, 8>, 8> n_valid{};
    long long total_valid = 0;
    for (int s = 0; s < samples; ++s) {
      const DepthFrame frame = apply_noise(ideal, cfg.noise, cfg.sensor, rng, s);
      for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
          if (!frame.valid[r][c]) continue;
          const double err = frame.distance_mm[r][c] - ideal.px[r][c].distance_mm;
          sum[r][c] += err;
          sum_sq[r][c] += err * err;
          ++n_valid[r][c];
          ++total_valid;
        }
    }
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) {
        const int n = n_valid[r][c];
        if (n > 0) row.mean_err_mm[r][c] = sum[r][c] / n;
        if (n > 1) {
          const double var =
              (sum_sq[r][c] - sum[r][c] * sum[r][c] / n) / (n - 1);
          row.sigma_mm[r][c] = var > 0.0 ? std::sqrt(var) : 0.0;
        }
      }
    row.validity = static_cast<double>(total_valid) / (64.0 * samples);
    rows.push_back(row);
  }
  return rows;
}

inline int cmd_characterize(const CharacterizeArgs& args) {
  try {
    RunConfig cfg;
    if (!args.config_path.empty())
      cfg = run_config_from_json(detail::parse_json_file(args.config_path));
    if (args.distances_m.empty()) throw ConfigError("distances", "at least one distance required");
    if (args.out_path.empty()) throw ConfigError("out", "output path is required");

    const auto rows = characterize_model(cfg, args.distances_m, args.samples);
    std::string csv = "distance_m";
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) csv += ",mean_err_" + std::to_string(r) + std::to_string(c);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) csv += ",sigma_" + std::to_string(r) + std::to_string(c);
    csv += ",validity\n";
    for (const CharacterizeRow& row : rows) {
      csv += io::format_double(row.distance_m, 3);
      for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) csv += ',' + io::format_double(row.mean_err_mm[r][c], 3);
      for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) csv += ',' + io::format_double(row.sigma_mm[r][c], 3);
      csv += ',' + io::format_double(row.validity) + '\n';
    }
    io::write_text_file(args.out_path, csv);
  } catch (const std::exception& e) {
    return detail::report_error(e);
  }
  return 0;
}

struct ScenarioGenArgs {
  std::string kind;
  ScenarioParams params;
  std::string out_path;
};

inline int cmd_scenario_gen(const ScenarioGenArgs& args) {
  try {
    if (args.out_path.empty()) throw ConfigError("out", "output path is required");
    const ScenarioConfig sc = make_scenario(args.kind, args.params);
    io::write_text_file(args.out_path, to_json(sc).dump(2) + "\n");
  } catch (const std::exception& e) {
    return detail::report_error(e);
  }
  return 0;
}

}  // namespace tofsim
