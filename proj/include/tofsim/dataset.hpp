#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tofsim/config.hpp"
#include "tofsim/io.hpp"
#include "tofsim/policy.hpp"
#include "tofsim/sensor.hpp"

namespace tofsim {

struct StateSample {
  std::int64_t timestamp_ms = 0;
  double x = 0.0, y = 0.0, z = 0.0;
  double roll = 0.0, pitch = 0.0, yaw = 0.0;
  double vx = 0.0, vy = 0.0, vz = 0.0;
  friend bool operator==(const StateSample&, const StateSample&) = default;
};

struct TimedCommand {
  std::int64_t timestamp_ms = 0;
  Command command;
};

inline bool operator==(const TimedCommand& a, const TimedCommand& b) {
  return a.timestamp_ms == b.timestamp_ms && a.command.v_forward == b.command.v_forward &&
         a.command.yaw_rate == b.command.yaw_rate &&
         a.command.v_vertical == b.command.v_vertical && a.command.mode == b.command.mode;
}

/// A recorded flight: ToF stream, state stream, optional commands, metadata.
/// Streams carry millisecond timestamps and may run at different rates.
struct LogBundle {
  std::vector<DepthFrame> tof;
  std::vector<StateSample> state;
  std::optional<std::vector<TimedCommand>> commands;
  json meta = json::object();
};

inline bool operator==(const LogBundle& a, const LogBundle& b) {
  return a.tof == b.tof && a.state == b.state && a.commands == b.commands && a.meta == b.meta;
}

inline constexpr int kLogSchemaVersion = 1;

namespace detail {

inline std::string tof_csv_header() {
  std::string h = "timestamp_ms";
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) h += ",d" + std::to_string(r) + std::to_string(c);
  return h;
}

inline constexpr const char* kStateCsvHeader = "timestamp_ms,x,y,z,roll,pitch,yaw,vx,vy,vz";
inline constexpr const char* kCommandsCsvHeader = "timestamp_ms,v_forward,yaw_rate,v_vertical,mode";

}  // namespace detail

/// Writes tof.csv / state.csv / commands.csv (if present) / meta.json.
/// Invalid pixels serialize as distance -1. Overwrites existing files.
inline void write_log(const LogBundle& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  std::string tof = detail::tof_csv_header() + "\n";
  for (const DepthFrame& f : bundle.tof) {
    tof += std::to_string(f.timestamp_ms);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) {
        tof += ',';
        tof += std::to_string(f.valid[r][c] ? f.distance_mm[r][c] : -1);
      }
    tof += '\n';
  }
  io::write_text_file(dir / "tof.csv", tof);

  std::string state = std::string(detail::kStateCsvHeader) + "\n";
  for (const StateSample& s : bundle.state) {
    state += std::to_string(s.timestamp_ms);
    for (double v : {s.x, s.y, s.z, s.roll, s.pitch, s.yaw, s.vx, s.vy, s.vz}) {
      state += ',';
      state += io::format_double_exact(v);
    }
    state += '\n';
  }
  io::write_text_file(dir / "state.csv", state);

  if (bundle.commands) {
    std::string cmds = std::string(detail::kCommandsCsvHeader) + "\n";
    for (const TimedCommand& c : *bundle.commands) {
      cmds += std::to_string(c.timestamp_ms);
      for (double v : {c.command.v_forward, c.command.yaw_rate, c.command.v_vertical}) {
        cmds += ',';
        cmds += io::format_double_exact(v);
      }
      cmds += ',';
      cmds += to_string(c.command.mode);
      cmds += '\n';
    }
    io::write_text_file(dir / "commands.csv", cmds);
  } else {
    std::filesystem::remove(dir / "commands.csv");
  }

  json meta = bundle.meta;
  meta["schema_version"] = kLogSchemaVersion;
  io::write_text_file(dir / "meta.json", meta.dump(2) + "\n");
}

/// Reads a log directory back, validating the schema, monotone timestamps
/// and value ranges. Any malformed row raises a ParseError naming file and
/// line; distances are checked against the 8x8 sensor's range.
inline LogBundle read_log(const std::filesystem::path& dir,
                          const SensorConfig& sensor = SensorConfig{}) {
  LogBundle bundle;

  {
    const std::string fname = (dir / "tof.csv").string();
    const std::string text = io::read_text_file(dir / "tof.csv");
    const auto lines = io::split_lines(text);
    if (lines.empty() || std::string(lines[0]) != detail::tof_csv_header())
      throw ParseError(fname, 1, "bad header, expected '" + detail::tof_csv_header() + "'");
    std::int64_t prev_ts = -1;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto fields = io::split_csv_line(lines[i]);
      if (fields.size() != 65)
        throw ParseError(fname, i + 1,
                         "expected 65 columns, got " + std::to_string(fields.size()));
      DepthFrame f;
      if (!io::parse_i64(fields[0], f.timestamp_ms))
        throw ParseError(fname, i + 1, "bad timestamp");
      if (f.timestamp_ms <= prev_ts)
        throw ParseError(fname, i + 1, "timestamps must be strictly increasing");
      prev_ts = f.timestamp_ms;
      for (int k = 0; k < 64; ++k) {
        int d = 0;
        if (!io::parse_int(fields[k + 1], d)) throw ParseError(fname, i + 1, "bad distance value");
        const int r = k / 8, c = k % 8;
        if (d == -1) continue;
        if (d <= 0 || d > sensor.max_range_mm)
          throw ParseError(fname, i + 1,
                           "distance " + std::to_string(d) + " outside (0, " +
                               std::to_string(sensor.max_range_mm) + "]");
        f.distance_mm[r][c] = d;
        f.valid[r][c] = true;
      }
      bundle.tof.push_back(f);
    }
  }

  {
    const std::string fname = (dir / "state.csv").string();
    const std::string text = io::read_text_file(dir / "state.csv");
    const auto lines = io::split_lines(text);
    if (lines.empty() || std::string(lines[0]) != detail::kStateCsvHeader)
      throw ParseError(fname, 1, "bad header");
    std::int64_t prev_ts = -1;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto fields = io::split_csv_line(lines[i]);
      if (fields.size() != 10)
        throw ParseError(fname, i + 1,
                         "expected 10 columns, got " + std::to_string(fields.size()));
      StateSample s;
      if (!io::parse_i64(fields[0], s.timestamp_ms)) throw ParseError(fname, i + 1, "bad timestamp");
      if (s.timestamp_ms <= prev_ts)
        throw ParseError(fname, i + 1, "timestamps must be strictly increasing");
      prev_ts = s.timestamp_ms;
      double* slots[] = {&s.x, &s.y, &s.z, &s.roll, &s.pitch, &s.yaw, &s.vx, &s.vy, &s.vz};
      for (int k = 0; k < 9; ++k)
        if (!io::parse_double(fields[k + 1], *slots[k]))
          throw ParseError(fname, i + 1, "bad numeric value in column " + std::to_string(k + 2));
      bundle.state.push_back(s);
    }
  }

  if (std::filesystem::exists(dir / "commands.csv")) {
    const std::string fname = (dir / "commands.csv").string();
    const std::string text = io::read_text_file(dir / "commands.csv");
    const auto lines = io::split_lines(text);
    if (lines.empty() || std::string(lines[0]) != detail::kCommandsCsvHeader)
      throw ParseError(fname, 1, "bad header");
    std::vector<TimedCommand> cmds;
    std::int64_t prev_ts = -1;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto fields = io::split_csv_line(lines[i]);
      if (fields.size() != 5)
        throw ParseError(fname, i + 1, "expected 5 columns, got " + std::to_string(fields.size()));
      TimedCommand c;
      if (!io::parse_i64(fields[0], c.timestamp_ms)) throw ParseError(fname, i + 1, "bad timestamp");
      if (c.timestamp_ms <= prev_ts)
        throw ParseError(fname, i + 1, "timestamps must be strictly increasing");
      prev_ts = c.timestamp_ms;
      if (!io::parse_double(fields[1], c.command.v_forward) ||
          !io::parse_double(fields[2], c.command.yaw_rate) ||
          !io::parse_double(fields[3], c.command.v_vertical))
        throw ParseError(fname, i + 1, "bad numeric value");
      const auto mode = mode_from_string(std::string(fields[4]));
      if (!mode) throw ParseError(fname, i + 1, "unknown mode '" + std::string(fields[4]) + "'");
      c.command.mode = *mode;
      cmds.push_back(c);
    }
    bundle.commands = std::move(cmds);
  }

  {
    const std::string fname = (dir / "meta.json").string();
    const std::string text = io::read_text_file(dir / "meta.json");
    json meta = json::parse(text, nullptr, false);
    if (meta.is_discarded() || !meta.is_object())
      throw ParseError(fname, 1, "invalid JSON object");
    if (!meta.contains("schema_version") || meta["schema_version"] != kLogSchemaVersion)
      throw ParseError(fname, 1, "unsupported schema_version");
    bundle.meta = std::move(meta);
  }

  return bundle;
}

/// Feeds every recorded ToF frame through the decision pipeline, pairing it
/// with the state sample nearest at-or-before the frame (or a hover default),
/// and threading the dead-end history across frames.
inline std::vector<TimedCommand> replay(const LogBundle& bundle, const PerceptionConfig& pcfg,
                                        const PolicyConfig& cfg,
                                        const SensorConfig& scfg = SensorConfig{}) {
  std::vector<TimedCommand> out;
  if (bundle.tof.empty()) return out;
  const std::int64_t t0 = bundle.tof.front().timestamp_ms;
  DeadEndHistory history;
  std::size_t state_idx = 0;

  for (const DepthFrame& frame : bundle.tof) {
    DroneState state;
    state.height = cfg.cruise_height;
    while (state_idx + 1 < bundle.state.size() &&
           bundle.state[state_idx + 1].timestamp_ms <= frame.timestamp_ms)
      ++state_idx;
    if (!bundle.state.empty() && bundle.state[state_idx].timestamp_ms <= frame.timestamp_ms) {
      const StateSample& s = bundle.state[state_idx];
      state.x = s.x;
      state.y = s.y;
      state.height = s.z;
      state.yaw = s.yaw;
      state.v_forward = s.vx * std::cos(s.yaw) + s.vy * std::sin(s.yaw);
      state.v_vertical = s.vz;
      state.time_s = s.timestamp_ms / 1000.0;
    }
    const double elapsed_s = (frame.timestamp_ms - t0) / 1000.0;
    DecideResult res = decide(frame, state, std::move(history), elapsed_s, cfg, pcfg, scfg);
    history = std::move(res.history);
    out.push_back({frame.timestamp_ms, res.command});
  }
  return out;
}

}  // namespace tofsim
