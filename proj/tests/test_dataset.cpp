#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "tofsim/dataset.hpp"

using namespace tofsim;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "tofsim_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

LogBundle random_bundle(unsigned seed, bool with_commands) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> dist_mm(1, 4000);
  std::uniform_real_distribution<double> value(-3.0, 3.0);
  LogBundle b;
  std::int64_t ts = 1000;
  for (int i = 0; i < 12; ++i) {
    DepthFrame f;
    f.timestamp_ms = ts;
    ts += 66 + static_cast<int>(coin(gen) * 5);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c)
        if (coin(gen) < 0.8) {
          f.valid[r][c] = true;
          f.distance_mm[r][c] = dist_mm(gen);
        }
    b.tof.push_back(f);
  }
  ts = 995;
  for (int i = 0; i < 30; ++i) {
    StateSample s;
    s.timestamp_ms = ts;
    ts += 20;
    s.x = value(gen);
    s.y = value(gen);
    s.z = 0.4;
    s.yaw = value(gen) / 3.0;
    s.vx = value(gen) / 3.0;
    s.vy = value(gen) / 3.0;
    s.vz = 0.0;
    b.state.push_back(s);
  }
  if (with_commands) {
    std::vector<TimedCommand> cmds;
    ts = 1000;
    for (int i = 0; i < 12; ++i) {
      TimedCommand c;
      c.timestamp_ms = ts;
      ts += 66;
      c.command.v_forward = value(gen) / 3.0;
      c.command.yaw_rate = value(gen) / 3.0;
      c.command.v_vertical = 0.0;
      c.command.mode = i % 2 ? Mode::Cruise : Mode::SlowSteer;
      cmds.push_back(c);
    }
    b.commands = std::move(cmds);
  }
  b.meta["recording"] = "synthetic";
  b.meta["note"] = 42;
  return b;
}

void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  io::write_text_file(p, text);
}

std::vector<std::string> minimal_tof_lines() {
  std::string header = "timestamp_ms";
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) header += ",d" + std::to_string(r) + std::to_string(c);
  std::string row = "1000";
  for (int k = 0; k < 64; ++k) row += ",500";
  return {header, row};
}

void write_minimal_side_files(const fs::path& dir) {
  write_lines(dir / "state.csv", {"timestamp_ms,x,y,z,roll,pitch,yaw,vx,vy,vz",
                                  "1000,0,0,0.4,0,0,0,0,0,0"});
  io::write_text_file(dir / "meta.json", "{\"schema_version\": 1}\n");
}

}  // namespace

TEST_CASE("write then read round-trips the bundle") {
  for (bool with_commands : {true, false}) {
    const fs::path dir = temp_dir(with_commands ? "rt_cmds" : "rt_plain");
    const LogBundle b = random_bundle(with_commands ? 1 : 2, with_commands);
    write_log(b, dir);
    CHECK(fs::exists(dir / "commands.csv") == with_commands);
    const LogBundle back = read_log(dir);
    LogBundle expected = b;
    expected.meta["schema_version"] = kLogSchemaVersion;
    CHECK(back == expected);
  }
}

TEST_CASE("round trip holds across many random bundles") {
  for (unsigned seed = 10; seed < 40; ++seed) {
    const fs::path dir = temp_dir("rt_many");
    const LogBundle b = random_bundle(seed, seed % 2 == 0);
    write_log(b, dir);
    const LogBundle back = read_log(dir);
    CHECK(back.tof == b.tof);
    CHECK(back.state == b.state);
    CHECK(back.commands == b.commands);
  }
}

TEST_CASE("invalid pixels serialize as -1 and restore as invalid") {
  const fs::path dir = temp_dir("sentinel");
  LogBundle b = random_bundle(3, false);
  b.tof[0].valid[2][5] = false;
  b.tof[0].distance_mm[2][5] = 0;
  write_log(b, dir);
  const std::string text = io::read_text_file(dir / "tof.csv");
  CHECK(text.find("-1") != std::string::npos);
  const LogBundle back = read_log(dir);
  CHECK_FALSE(back.tof[0].valid[2][5]);
  CHECK(back.tof[0].distance_mm[2][5] == 0);
}

TEST_CASE("a row with 63 pixels is rejected with its line number") {
  const fs::path dir = temp_dir("short_row");
  auto lines = minimal_tof_lines();
  std::string bad = "1067";
  for (int k = 0; k < 63; ++k) bad += ",500";
  lines.push_back(bad);  // line 3
  write_lines(dir / "tof.csv", lines);
  write_minimal_side_files(dir);
  try {
    read_log(dir);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("tof.csv:3") != std::string::npos);
    CHECK(msg.find("64") != std::string::npos);
  }
}

TEST_CASE("distances beyond the sensor range are rejected") {
  const fs::path dir = temp_dir("too_far");
  auto lines = minimal_tof_lines();
  lines[1] = "1000,4500";
  for (int k = 1; k < 64; ++k) lines[1] += ",500";
  write_lines(dir / "tof.csv", lines);
  write_minimal_side_files(dir);
  CHECK_THROWS_AS(read_log(dir), ParseError);
}

TEST_CASE("non-monotone timestamps are rejected") {
  const fs::path dir = temp_dir("bad_ts");
  auto lines = minimal_tof_lines();
  lines.push_back(lines[1]);  // duplicate timestamp 1000
  write_lines(dir / "tof.csv", lines);
  write_minimal_side_files(dir);
  CHECK_THROWS_AS(read_log(dir), ParseError);
}

TEST_CASE("garbage numerics are rejected") {
  const fs::path dir = temp_dir("bad_num");
  auto lines = minimal_tof_lines();
  lines[1][6] = 'x';  // corrupt a distance digit
  write_lines(dir / "tof.csv", lines);
  write_minimal_side_files(dir);
  CHECK_THROWS_AS(read_log(dir), ParseError);
}

TEST_CASE("missing tof.csv is an error") {
  const fs::path dir = temp_dir("no_tof");
  write_minimal_side_files(dir);
  CHECK_THROWS_AS(read_log(dir), std::runtime_error);
}

TEST_CASE("replay on empty frames cruises at v_max") {
  LogBundle b;
  std::int64_t ts = 0;
  for (int i = 0; i < 5; ++i) {
    DepthFrame f;
    f.timestamp_ms = ts;
    ts += 67;
    b.tof.push_back(f);
  }
  PolicyConfig cfg;
  cfg.v_max = 1.3;
  const auto cmds = replay(b, {}, cfg);
  REQUIRE(cmds.size() == 5);
  for (const TimedCommand& c : cmds) {
    CHECK(c.command.mode == Mode::Cruise);
    CHECK(c.command.v_forward == 1.3);
  }
}

TEST_CASE("replay reacts to a frontal group and stays deterministic") {
  LogBundle b;
  DepthFrame f;
  f.timestamp_ms = 100;
  for (int r = 3; r <= 4; ++r)
    for (int c = 3; c <= 4; ++c) {
      f.valid[r][c] = true;
      f.distance_mm[r][c] = 300;
    }
  b.tof.push_back(f);
  const PolicyConfig cfg;
  const auto cmds = replay(b, {}, cfg);
  REQUIRE(cmds.size() == 1);
  CHECK(cmds[0].command.mode == Mode::StopSteer);
  CHECK(cmds[0].command.v_forward == 0.0);
  CHECK(cmds[0].timestamp_ms == 100);

  const LogBundle b2 = b;
  const auto again = replay(b2, {}, cfg);
  CHECK(again == cmds);
}

TEST_CASE("replay pairs frames with the state at or before them") {
  LogBundle b;
  DepthFrame f;
  f.timestamp_ms = 1000;
  b.tof.push_back(f);
  StateSample s0;
  s0.timestamp_ms = 900;
  s0.z = 0.1;  // below cruise height -> height hold climbs
  StateSample s1;
  s1.timestamp_ms = 1100;  // in the future, must not be used
  s1.z = 0.4;
  b.state = {s0, s1};
  const PolicyConfig cfg;
  const auto cmds = replay(b, {}, cfg);
  REQUIRE(cmds.size() == 1);
  CHECK(cmds[0].command.v_vertical == Catch::Approx(0.3));  // 1.0 * (0.4 - 0.1)
}

TEST_CASE("replay applies the battery budget from the first frame") {
  LogBundle b;
  DepthFrame f0;
  f0.timestamp_ms = 5'000'000;  // absolute start time is irrelevant
  DepthFrame f1;
  f1.timestamp_ms = f0.timestamp_ms + 500'000;  // 500 s later
  b.tof = {f0, f1};
  const PolicyConfig cfg;  // 440 s budget
  const auto cmds = replay(b, {}, cfg);
  REQUIRE(cmds.size() == 2);
  CHECK(cmds[0].command.mode == Mode::Cruise);
  CHECK(cmds[1].command.mode == Mode::Land);
}
