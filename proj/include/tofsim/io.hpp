#pragma once

#include <charconv>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "tofsim/config.hpp"
#include "tofsim/sim.hpp"

namespace tofsim {

/// Parse failure with file/line context.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + message) {}
};

namespace io {

/// Fixed-precision, locale-independent float formatting so identical runs
/// produce identical bytes.
inline std::string format_double(double v, int precision = 6) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return std::string(buf, buf + n);
}

/// Shortest representation that parses back to the same double; used where
/// a round trip must be lossless.
inline std::string format_double_exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline bool parse_i64(std::string_view s, std::int64_t& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline bool parse_int(std::string_view s, int& out) {
  std::int64_t v = 0;
  if (!parse_i64(s, v) || v < INT_MIN || v > INT_MAX) return false;
  out = static_cast<int>(v);
  return true;
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  std::string copy(s);  // strtod needs a terminator
  char* end = nullptr;
  out = std::strtod(copy.c_str(), &end);
  return end == copy.c_str() + copy.size() && std::isfinite(out);
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

/// Splits text into lines, tolerating a trailing newline and CRLF input.
/// The views alias the input; rvalue strings are rejected so a temporary
/// cannot be split in place.
std::vector<std::string_view> split_lines(std::string&& text) = delete;
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = nl + 1;
  }
  return lines;
}

}  // namespace io

inline constexpr const char* kTraceCsvHeader =
    "time_s,x,y,height,yaw,v_forward,yaw_rate,v_vertical,mode,min_group_distance_mm";

inline std::string trace_to_csv(const Trace& trace) {
  std::string out;
  out += kTraceCsvHeader;
  out += '\n';
  for (const TraceTick& t : trace.ticks) {
    out += io::format_double(t.time_s);
    out += ',';
    out += io::format_double(t.x);
    out += ',';
    out += io::format_double(t.y);
    out += ',';
    out += io::format_double(t.height);
    out += ',';
    out += io::format_double(t.yaw);
    out += ',';
    out += io::format_double(t.v_forward);
    out += ',';
    out += io::format_double(t.yaw_rate);
    out += ',';
    out += io::format_double(t.v_vertical);
    out += ',';
    out += to_string(t.mode);
    out += ',';
    out += std::to_string(t.min_group_distance_mm);
    out += '\n';
  }
  return out;
}

inline json metrics_to_json(const RunMetrics& m, TerminalCause cause) {
  json j;
  j["crashed"] = m.crashed;
  if (m.crash_position)
    j["crash_position"] = {{"x", m.crash_position->x}, {"y", m.crash_position->y}};
  else
    j["crash_position"] = nullptr;
  j["terminal_cause"] = to_string(cause);
  j["flight_time_s"] = m.flight_time_s;
  j["distance_m"] = m.distance_m;
  j["min_clearance_m"] = m.min_clearance_m;
  if (m.final_stop_distance_m)
    j["final_stop_distance_m"] = *m.final_stop_distance_m;
  else
    j["final_stop_distance_m"] = nullptr;
  j["turnarounds"] = m.turnarounds;
  return j;
}

}  // namespace tofsim
