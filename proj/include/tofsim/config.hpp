#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tofsim/geometry.hpp"

namespace tofsim {

using json = nlohmann::ordered_json;

/// Configuration / schema violation; what() names the offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

using Grid8 = std::array<std::array<double, 8>, 8>;

struct SensorConfig {
  double fov_h_deg = 45.0;
  double fov_v_deg = 45.0;
  int rows = 8;
  int cols = 8;
  int max_range_mm = 4000;
  double frame_rate_hz = 15.0;

  double fov_h_rad() const { return deg_to_rad(fov_h_deg); }
  double fov_v_rad() const { return deg_to_rad(fov_v_deg); }
};

struct ValidityKnot {
  double distance_m = 0.0;
  double probability = 0.0;
};

struct NoiseConfig {
  Grid8 bias_mm{};
  Grid8 sigma_mm{};
  std::vector<ValidityKnot> validity_knots;
  double reflectivity_cutoff_deg = 30.0;
  std::uint64_t rng_seed = 0;

  /// Characterization-derived defaults: left-to-right bias gradient
  /// 19->42 mm with +10 mm corners, sigma 3.4 mm center to 7.3 mm corners.
  static NoiseConfig defaults() {
    NoiseConfig n;
    for (int r = 0; r < 8; ++r) {
      for (int c = 0; c < 8; ++c) {
        n.bias_mm[r][c] = 19.0 + 23.0 * (static_cast<double>(c) / 7.0);
        const double dr = r - 3.5;
        const double dc = c - 3.5;
        const double radial = std::sqrt(dr * dr + dc * dc) / std::sqrt(2.0 * 3.5 * 3.5);
        n.sigma_mm[r][c] = 3.4 + (7.3 - 3.4) * radial;
      }
    }
    for (int r : {0, 7})
      for (int c : {0, 7}) n.bias_mm[r][c] += 10.0;
    n.validity_knots = {{0.2, 0.99}, {2.0, 0.95}, {2.6, 0.55}, {3.0, 0.30}, {4.0, 0.0}};
    return n;
  }

  /// Noise-free sensor: zero bias/sigma, every returning pixel valid.
  static NoiseConfig identity() {
    NoiseConfig n;
    n.validity_knots = {{0.0, 1.0}, {4.0, 1.0}};
    return n;
  }
};

struct PerceptionConfig {
  int occupancy_threshold_mm = 2000;
  int connectivity = 8;  // 4 or 8
  int min_group_size = 2;
  int max_groups = 4;
};

struct PolicyConfig {
  double d_fear = 0.15;
  double d_short = 0.4;
  double d_med = 0.7;
  double d_long = 1.4;
  double v_back = -0.2;
  double v_slow = 0.15;
  double v_med = 0.4;
  double v_fast = 0.85;
  double v_max = 1.0;
  double omega_slow = 0.7;
  double omega_fast = 1.0;
  double cruise_height = 0.4;
  double v_vertical = 0.2;
  double d_vert = 0.3;
  std::vector<int> ceiling_rows = {0};
  std::vector<int> ground_rows = {7};
  std::vector<int> danger_cols = {3, 4};
  std::vector<int> caution_cols = {2, 5};
  int deadend_flip_count = 4;
  double deadend_window_s = 3.0;
  double battery_budget_s = 440.0;
};

struct SimConfig {
  double control_rate_hz = 15.0;
  int physics_substeps = 10;
  double a_max = 1.5;
  double a_min = -20.0;
  double yaw_accel_limit = 8.0;
  double collision_radius = 0.05;
  double duration_s = 60.0;
};

struct RunConfig {
  SensorConfig sensor;
  NoiseConfig noise = NoiseConfig::defaults();
  PerceptionConfig perception;
  PolicyConfig policy;
  SimConfig sim;
};

namespace detail {

inline bool contains(const std::vector<int>& v, int x) {
  for (int e : v)
    if (e == x) return true;
  return false;
}

/// Strict section reader: typed lookups plus unknown-key detection.
class JsonSection {
 public:
  JsonSection(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected a JSON object");
  }

  ~JsonSection() = default;

  void get(const char* key, double& out) {
    mark(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(path_ + "." + key, "expected a number");
    out = v.get<double>();
  }

  void get(const char* key, int& out) {
    mark(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(path_ + "." + key, "expected an integer");
    out = v.get<int>();
  }

  void get(const char* key, std::uint64_t& out) {
    mark(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(path_ + "." + key, "expected an integer");
    out = v.get<std::uint64_t>();
  }

  void get(const char* key, std::vector<int>& out) {
    mark(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(path_ + "." + key, "expected an integer array");
    std::vector<int> parsed;
    for (const json& e : v) {
      if (!e.is_number_integer()) throw ConfigError(path_ + "." + key, "expected an integer array");
      parsed.push_back(e.get<int>());
    }
    out = std::move(parsed);
  }

  void get(const char* key, Grid8& out) {
    mark(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 8) throw ConfigError(path_ + "." + key, "expected 8 rows");
    for (int r = 0; r < 8; ++r) {
      const json& row = v.at(r);
      if (!row.is_array() || row.size() != 8)
        throw ConfigError(path_ + "." + key, "expected 8 columns per row");
      for (int c = 0; c < 8; ++c) {
        if (!row.at(c).is_number()) throw ConfigError(path_ + "." + key, "expected numbers");
        out[r][c] = row.at(c).get<double>();
      }
    }
  }

  void get(const char* key, std::vector<ValidityKnot>& out) {
    mark(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(path_ + "." + key, "expected an array of [distance_m, probability] pairs");
    std::vector<ValidityKnot> knots;
    for (const json& e : v) {
      if (!e.is_array() || e.size() != 2 || !e.at(0).is_number() || !e.at(1).is_number())
        throw ConfigError(path_ + "." + key, "expected [distance_m, probability] pairs");
      knots.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    }
    out = std::move(knots);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!known_.count(it.key()))
        throw ConfigError(path_ + "." + it.key(), "unknown field");
    }
  }

 private:
  void mark(const char* key) { known_.insert(key); }

  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

inline json grid_to_json(const Grid8& g) {
  json rows = json::array();
  for (const auto& row : g) {
    json r = json::array();
    for (double v : row) r.push_back(v);
    rows.push_back(r);
  }
  return rows;
}

inline void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Validation

inline void validate(const SensorConfig& c, const std::string& path = "sensor") {
  using detail::require;
  require(c.rows == 8 && c.cols == 8, path + ".rows", "only the 8x8 mode is supported");
  require(c.fov_h_deg > 0.0 && c.fov_h_deg <= 90.0, path + ".fov_h_deg", "must be in (0, 90]");
  require(c.fov_v_deg > 0.0 && c.fov_v_deg <= 90.0, path + ".fov_v_deg", "must be in (0, 90]");
  require(c.max_range_mm > 0, path + ".max_range_mm", "must be positive");
  require(c.frame_rate_hz > 0.0, path + ".frame_rate_hz", "must be positive");
}

inline void validate(const NoiseConfig& c, const SensorConfig& sensor,
                     const std::string& path = "noise") {
  using detail::require;
  for (const auto& row : c.sigma_mm)
    for (double s : row) require(s >= 0.0, path + ".sigma_mm", "sigma must be non-negative");
  require(!c.validity_knots.empty(), path + ".validity_knots", "must not be empty");
  const double max_range_m = sensor.max_range_mm / 1000.0;
  for (std::size_t i = 0; i < c.validity_knots.size(); ++i) {
    const ValidityKnot& k = c.validity_knots[i];
    require(k.probability >= 0.0 && k.probability <= 1.0, path + ".validity_knots",
            "probabilities must be in [0, 1]");
    require(k.distance_m >= 0.0, path + ".validity_knots", "distances must be non-negative");
    if (i > 0) {
      require(k.distance_m > c.validity_knots[i - 1].distance_m, path + ".validity_knots",
              "distances must be strictly increasing");
      require(k.probability <= c.validity_knots[i - 1].probability, path + ".validity_knots",
              "probabilities must be non-increasing");
    }
    require(k.distance_m <= max_range_m || k.probability == 0.0, path + ".validity_knots",
            "probability must be 0 beyond the sensor range");
  }
  require(c.reflectivity_cutoff_deg > 0.0 && c.reflectivity_cutoff_deg <= 90.0,
          path + ".reflectivity_cutoff_deg", "must be in (0, 90]");
}

inline void validate(const PerceptionConfig& c, const std::string& path = "perception") {
  using detail::require;
  require(c.occupancy_threshold_mm > 0, path + ".occupancy_threshold_mm", "must be positive");
  require(c.connectivity == 4 || c.connectivity == 8, path + ".connectivity", "must be 4 or 8");
  require(c.min_group_size >= 1, path + ".min_group_size", "must be >= 1");
  require(c.max_groups >= 1, path + ".max_groups", "must be >= 1");
}

inline void validate(const PolicyConfig& c, const std::string& path = "policy") {
  using detail::require;
  require(c.d_fear > 0.0 && c.d_fear < c.d_short && c.d_short < c.d_med && c.d_med < c.d_long,
          path + ".d_fear", "need 0 < d_fear < d_short < d_med < d_long");
  require(c.v_back < 0.0, path + ".v_back", "must be negative");
  require(c.v_slow >= 0.0 && c.v_slow < c.v_med && c.v_med < c.v_fast, path + ".v_slow",
          "need 0 <= v_slow < v_med < v_fast");
  require(c.v_max > 0.0, path + ".v_max", "must be positive");
  require(c.omega_slow >= 0.0 && c.omega_fast >= 0.0, path + ".omega_slow",
          "steering rates must be non-negative");
  require(c.cruise_height > 0.0, path + ".cruise_height", "must be positive");
  require(c.v_vertical > 0.0, path + ".v_vertical", "must be positive");
  require(c.d_vert > 0.0, path + ".d_vert", "must be positive");
  auto check_indices = [&](const std::vector<int>& v, const char* name, int limit) {
    for (int i : v)
      require(i >= 0 && i < limit, path + "." + name, "indices must be in [0, 8)");
  };
  check_indices(c.ceiling_rows, "ceiling_rows", 8);
  check_indices(c.ground_rows, "ground_rows", 8);
  check_indices(c.danger_cols, "danger_cols", 8);
  check_indices(c.caution_cols, "caution_cols", 8);
  for (int i : c.danger_cols)
    require(!detail::contains(c.caution_cols, i), path + ".danger_cols",
            "danger and caution columns must be disjoint");
  for (int i : c.ceiling_rows)
    require(!detail::contains(c.ground_rows, i), path + ".ceiling_rows",
            "ceiling and ground rows must be disjoint");
  require(c.deadend_flip_count >= 1, path + ".deadend_flip_count", "must be >= 1");
  require(c.deadend_window_s > 0.0, path + ".deadend_window_s", "must be positive");
  require(c.battery_budget_s > 0.0, path + ".battery_budget_s", "must be positive");
}

inline void validate(const SimConfig& c, const std::string& path = "sim") {
  using detail::require;
  require(c.control_rate_hz > 0.0, path + ".control_rate_hz", "must be positive");
  require(c.physics_substeps >= 1, path + ".physics_substeps", "must be >= 1");
  require(c.a_max > 0.0, path + ".a_max", "must be positive");
  require(c.a_min < 0.0, path + ".a_min", "must be negative");
  require(c.yaw_accel_limit > 0.0, path + ".yaw_accel_limit", "must be positive");
  require(c.collision_radius > 0.0, path + ".collision_radius", "must be positive");
  require(c.duration_s > 0.0, path + ".duration_s", "must be positive");
}

inline void validate(const RunConfig& c) {
  validate(c.sensor);
  validate(c.noise, c.sensor);
  validate(c.perception);
  validate(c.policy);
  validate(c.sim);
  detail::require(c.sim.control_rate_hz == c.sensor.frame_rate_hz, "sim.control_rate_hz",
                  "must equal sensor.frame_rate_hz");
}

// ---------------------------------------------------------------------------
// JSON (partial overrides on top of defaults)

inline SensorConfig sensor_from_json(const json& j, const std::string& path = "sensor") {
  SensorConfig c;
  detail::JsonSection s(j, path);
  s.get("fov_h_deg", c.fov_h_deg);
  s.get("fov_v_deg", c.fov_v_deg);
  s.get("rows", c.rows);
  s.get("cols", c.cols);
  s.get("max_range_mm", c.max_range_mm);
  s.get("frame_rate_hz", c.frame_rate_hz);
  s.finish();
  return c;
}

inline NoiseConfig noise_from_json(const json& j, const std::string& path = "noise") {
  NoiseConfig c = NoiseConfig::defaults();
  detail::JsonSection s(j, path);
  int ideal = 0;
  s.get("ideal", ideal);
  if (ideal) c = NoiseConfig::identity();
  s.get("bias_mm", c.bias_mm);
  s.get("sigma_mm", c.sigma_mm);
  s.get("validity_knots", c.validity_knots);
  s.get("reflectivity_cutoff_deg", c.reflectivity_cutoff_deg);
  s.get("rng_seed", c.rng_seed);
  s.finish();
  return c;
}

inline PerceptionConfig perception_from_json(const json& j, const std::string& path = "perception") {
  PerceptionConfig c;
  detail::JsonSection s(j, path);
  s.get("occupancy_threshold_mm", c.occupancy_threshold_mm);
  s.get("connectivity", c.connectivity);
  s.get("min_group_size", c.min_group_size);
  s.get("max_groups", c.max_groups);
  s.finish();
  return c;
}

inline PolicyConfig policy_from_json(const json& j, const std::string& path = "policy") {
  PolicyConfig c;
  detail::JsonSection s(j, path);
  s.get("d_fear", c.d_fear);
  s.get("d_short", c.d_short);
  s.get("d_med", c.d_med);
  s.get("d_long", c.d_long);
  s.get("v_back", c.v_back);
  s.get("v_slow", c.v_slow);
  s.get("v_med", c.v_med);
  s.get("v_fast", c.v_fast);
  s.get("v_max", c.v_max);
  s.get("omega_slow", c.omega_slow);
  s.get("omega_fast", c.omega_fast);
  s.get("cruise_height", c.cruise_height);
  s.get("v_vertical", c.v_vertical);
  s.get("d_vert", c.d_vert);
  s.get("ceiling_rows", c.ceiling_rows);
  s.get("ground_rows", c.ground_rows);
  s.get("danger_cols", c.danger_cols);
  s.get("caution_cols", c.caution_cols);
  s.get("deadend_flip_count", c.deadend_flip_count);
  s.get("deadend_window_s", c.deadend_window_s);
  s.get("battery_budget_s", c.battery_budget_s);
  s.finish();
  return c;
}

inline SimConfig sim_from_json(const json& j, const std::string& path = "sim") {
  SimConfig c;
  detail::JsonSection s(j, path);
  s.get("control_rate_hz", c.control_rate_hz);
  s.get("physics_substeps", c.physics_substeps);
  s.get("a_max", c.a_max);
  s.get("a_min", c.a_min);
  s.get("yaw_accel_limit", c.yaw_accel_limit);
  s.get("collision_radius", c.collision_radius);
  s.get("duration_s", c.duration_s);
  s.finish();
  return c;
}

inline RunConfig run_config_from_json(const json& j, const std::string& path = "config") {
  if (!j.is_object()) throw ConfigError(path, "expected a JSON object");
  RunConfig c;
  static const std::set<std::string> sections = {"sensor", "noise", "perception", "policy", "sim"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!sections.count(it.key())) throw ConfigError(path + "." + it.key(), "unknown section");
  }
  if (j.contains("sensor")) c.sensor = sensor_from_json(j.at("sensor"));
  if (j.contains("noise")) c.noise = noise_from_json(j.at("noise"));
  if (j.contains("perception")) c.perception = perception_from_json(j.at("perception"));
  if (j.contains("policy")) c.policy = policy_from_json(j.at("policy"));
  if (j.contains("sim")) c.sim = sim_from_json(j.at("sim"));
  validate(c);
  return c;
}

inline json to_json(const SensorConfig& c) {
  return json{{"fov_h_deg", c.fov_h_deg}, {"fov_v_deg", c.fov_v_deg},   {"rows", c.rows},
              {"cols", c.cols},           {"max_range_mm", c.max_range_mm},
              {"frame_rate_hz", c.frame_rate_hz}};
}

inline json to_json(const NoiseConfig& c) {
  json knots = json::array();
  for (const ValidityKnot& k : c.validity_knots) knots.push_back({k.distance_m, k.probability});
  return json{{"bias_mm", detail::grid_to_json(c.bias_mm)},
              {"sigma_mm", detail::grid_to_json(c.sigma_mm)},
              {"validity_knots", knots},
              {"reflectivity_cutoff_deg", c.reflectivity_cutoff_deg},
              {"rng_seed", c.rng_seed}};
}

inline json to_json(const PerceptionConfig& c) {
  return json{{"occupancy_threshold_mm", c.occupancy_threshold_mm},
              {"connectivity", c.connectivity},
              {"min_group_size", c.min_group_size},
              {"max_groups", c.max_groups}};
}

inline json to_json(const PolicyConfig& c) {
  return json{{"d_fear", c.d_fear},
              {"d_short", c.d_short},
              {"d_med", c.d_med},
              {"d_long", c.d_long},
              {"v_back", c.v_back},
              {"v_slow", c.v_slow},
              {"v_med", c.v_med},
              {"v_fast", c.v_fast},
              {"v_max", c.v_max},
              {"omega_slow", c.omega_slow},
              {"omega_fast", c.omega_fast},
              {"cruise_height", c.cruise_height},
              {"v_vertical", c.v_vertical},
              {"d_vert", c.d_vert},
              {"ceiling_rows", c.ceiling_rows},
              {"ground_rows", c.ground_rows},
              {"danger_cols", c.danger_cols},
              {"caution_cols", c.caution_cols},
              {"deadend_flip_count", c.deadend_flip_count},
              {"deadend_window_s", c.deadend_window_s},
              {"battery_budget_s", c.battery_budget_s}};
}

inline json to_json(const SimConfig& c) {
  return json{{"control_rate_hz", c.control_rate_hz},
              {"physics_substeps", c.physics_substeps},
              {"a_max", c.a_max},
              {"a_min", c.a_min},
              {"yaw_accel_limit", c.yaw_accel_limit},
              {"collision_radius", c.collision_radius},
              {"duration_s", c.duration_s}};
}

inline json to_json(const RunConfig& c) {
  return json{{"sensor", to_json(c.sensor)},
              {"noise", to_json(c.noise)},
              {"perception", to_json(c.perception)},
              {"policy", to_json(c.policy)},
              {"sim", to_json(c.sim)}};
}

}  // namespace tofsim
