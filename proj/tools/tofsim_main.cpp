#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tofsim/cli_commands.hpp"

namespace {

tofsim::ScenarioParams parse_params(const std::vector<std::string>& kv_pairs) {
  tofsim::ScenarioParams params;
  for (const std::string& kv : kv_pairs) {
    const auto eq = kv.find('=');
    double value = 0.0;
    if (eq == std::string::npos || !tofsim::io::parse_double(kv.substr(eq + 1), value))
      throw tofsim::ConfigError("param", "expected key=value with a numeric value, got '" + kv + "'");
    params[kv.substr(0, eq)] = value;
  }
  return params;
}

std::vector<double> parse_double_list(const std::string& csv, const char* flag) {
  std::vector<double> out;
  for (std::string_view field : tofsim::io::split_csv_line(csv)) {
    double v = 0.0;
    if (!tofsim::io::parse_double(field, v))
      throw tofsim::ConfigError(flag, "expected a comma-separated list of numbers");
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_range(const std::string& spec, const char* flag) {
  // start:stop:step, inclusive of stop within half a step
  double start = 0.0, stop = 0.0, step = 0.0;
  const auto c1 = spec.find(':');
  const auto c2 = spec.rfind(':');
  if (c1 == std::string::npos || c2 == c1 ||
      !tofsim::io::parse_double(spec.substr(0, c1), start) ||
      !tofsim::io::parse_double(spec.substr(c1 + 1, c2 - c1 - 1), stop) ||
      !tofsim::io::parse_double(spec.substr(c2 + 1), step) || step <= 0.0)
    throw tofsim::ConfigError(flag, "expected start:stop:step with step > 0");
  std::vector<double> out;
  for (double v = start; v <= stop + step / 2.0; v += step) out.push_back(v);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic obstacle-avoidance simulator for an 8x8 multi-zone ToF nano-drone"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run one scenario and write trace/metrics");
  std::string sim_scenario, sim_kind, sim_config, sim_out;
  std::vector<std::string> sim_params;
  double sim_v_max = 0.0;
  bool sim_has_v_max = false;
  std::uint64_t sim_seed = 0;
  sim->add_option("--scenario", sim_scenario, "Scenario JSON file");
  sim->add_option("--kind", sim_kind, "Built-in scenario kind");
  sim->add_option("--param", sim_params, "Scenario parameter key=value (repeatable)");
  sim->add_option("--config", sim_config, "RunConfig JSON overlay");
  sim->add_option("--v-max", sim_v_max, "Cruise velocity [m/s]")->each([&](const std::string&) {
    sim_has_v_max = true;
  });
  sim->add_option("--seed", sim_seed, "Random seed");
  sim->add_option("--out", sim_out, "Output directory")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a velocity sweep and write an aggregate CSV");
  std::string sweep_kind, sweep_config, sweep_out, sweep_v_list;
  std::vector<std::string> sweep_params;
  int sweep_trials = 1, sweep_jobs = 1;
  std::uint64_t sweep_seed = 0;
  sweep->add_option("--kind", sweep_kind, "Built-in scenario kind")->required();
  sweep->add_option("--param", sweep_params, "Scenario parameter key=value (repeatable)");
  sweep->add_option("--config", sweep_config, "RunConfig JSON overlay");
  sweep->add_option("--v-max", sweep_v_list, "Comma-separated v_max list")->required();
  sweep->add_option("--trials", sweep_trials, "Trials per v_max");
  sweep->add_option("--seed", sweep_seed, "Base seed (per-trial seeds are base + trial index)");
  sweep->add_option("--jobs", sweep_jobs, "Parallel workers");
  sweep->add_option("--out", sweep_out, "Output CSV path")->required();

  // replay
  auto* replay = app.add_subcommand("replay", "Replay a recorded log through the policy");
  std::string replay_log, replay_config, replay_out;
  replay->add_option("--log", replay_log, "Log directory (tof.csv, state.csv, meta.json)")
      ->required();
  replay->add_option("--config", replay_config, "RunConfig JSON overlay");
  replay->add_option("--out", replay_out, "Output commands.csv path")->required();

  // characterize
  auto* chr = app.add_subcommand("characterize", "Monte-Carlo the sensor model against a wall");
  std::string chr_config, chr_out, chr_distances, chr_range;
  int chr_samples = 1000;
  chr->add_option("--config", chr_config, "RunConfig JSON overlay");
  chr->add_option("--distances", chr_distances, "Comma-separated distances [m]");
  chr->add_option("--range", chr_range, "Distance range start:stop:step [m]");
  chr->add_option("--samples", chr_samples, "Frames per distance");
  chr->add_option("--out", chr_out, "Output CSV path")->required();

  // scenario gen
  auto* scenario = app.add_subcommand("scenario", "Scenario utilities");
  auto* gen = scenario->add_subcommand("gen", "Generate a scenario JSON from a built-in kind");
  std::string gen_kind, gen_out;
  std::vector<std::string> gen_params;
  gen->add_option("--kind", gen_kind, "Built-in scenario kind")->required();
  gen->add_option("--param", gen_params, "Scenario parameter key=value (repeatable)");
  gen->add_option("--out", gen_out, "Output JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors map to the documented exit 1
  }

  try {
    if (sim->parsed()) {
      tofsim::SimulateArgs args;
      args.scenario_path = sim_scenario;
      args.kind = sim_kind;
      args.params = parse_params(sim_params);
      args.config_path = sim_config;
      if (sim_has_v_max) args.v_max = sim_v_max;
      args.seed = sim_seed;
      args.out_dir = sim_out;
      return tofsim::cmd_simulate(args);
    }
    if (sweep->parsed()) {
      tofsim::SweepArgs args;
      args.kind = sweep_kind;
      args.params = parse_params(sweep_params);
      args.config_path = sweep_config;
      args.v_max_list = parse_double_list(sweep_v_list, "v-max");
      args.trials = sweep_trials;
      args.base_seed = sweep_seed;
      args.jobs = sweep_jobs;
      args.out_path = sweep_out;
      return tofsim::cmd_sweep(args);
    }
    if (replay->parsed()) {
      return tofsim::cmd_replay({replay_log, replay_config, replay_out});
    }
    if (chr->parsed()) {
      tofsim::CharacterizeArgs args;
      args.config_path = chr_config;
      if (!chr_distances.empty() && !chr_range.empty())
        throw tofsim::ConfigError("distances", "--distances and --range are mutually exclusive");
      if (!chr_distances.empty())
        args.distances_m = parse_double_list(chr_distances, "distances");
      else if (!chr_range.empty())
        args.distances_m = parse_range(chr_range, "range");
      else
        throw tofsim::ConfigError("distances", "one of --distances or --range is required");
      args.samples = chr_samples;
      args.out_path = chr_out;
      return tofsim::cmd_characterize(args);
    }
    if (scenario->parsed()) {
      if (gen->parsed())
        return tofsim::cmd_scenario_gen({gen_kind, parse_params(gen_params), gen_out});
      std::cerr << "error: scenario requires a subcommand (gen)\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
