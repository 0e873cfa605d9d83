#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "vdc/config.hpp"
#include "vdc/trace_io.hpp"

using namespace vdc;

namespace {

const char* kConfigPath = CONFIG_DIR "/desk_two_structure.yaml";

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("shipped config loads and resolves") {
  const LoadedConfig c = load_config(kConfigPath);
  CHECK(c.model.structures.size() == 2);
  CHECK(!c.model.structures[0].prismatic.has_value());
  CHECK(c.scenario.points.size() == 4);
  CHECK(c.scenario.loops == 2);
  CHECK_NOTHROW(resolve_frames(c.model));
  CHECK(c.gains.structures[0].k_f == 3e-7);
  CHECK(c.model.structures[1].actuator.supply_pressure == 1.85e7);
}

TEST_CASE("config round trips through its text form") {
  const LoadedConfig a = load_config(kConfigPath);
  const std::string text = write_config(a);
  const LoadedConfig b = parse_config(text);
  // Serializing again must reproduce the text exactly: all numeric fields
  // survive the 12-significant-digit round trip.
  CHECK(write_config(b) == text);
  CHECK(b.model.structures[0].geom.link_distal == a.model.structures[0].geom.link_distal);
  CHECK(b.model.structures[1].actuator.c_p1 == a.model.structures[1].actuator.c_p1);
  CHECK(b.scenario.step == a.scenario.step);
  CHECK(b.gains.structures[1].k_a(3, 3) == a.gains.structures[1].k_a(3, 3));
}

TEST_CASE("syntax errors report line and column") {
  try {
    parse_config("model: {a: [\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("validation names the offending key paths and collects all errors") {
  std::string text = slurp(kConfigPath);
  // Corrupt two independent fields.
  const auto p1 = text.find("link_base: 0.3");
  REQUIRE(p1 != std::string::npos);
  text.replace(p1, 14, "link_base: -.3");
  const auto p2 = text.find("leg_duration: 2");
  REQUIRE(p2 != std::string::npos);
  text.replace(p2, 15, "leg_duration: 0");
  try {
    parse_config(text);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("model.structures[0].revolute.link_base") != std::string::npos);
    CHECK(msg.find("scenario.leg_duration") != std::string::npos);
  }
}

TEST_CASE("stroke violating the closure triangle is rejected") {
  std::string text = slurp(kConfigPath);
  const auto p = text.find("stroke: 0.3");
  REQUIRE(p != std::string::npos);
  text.replace(p, 11, "stroke: 9.9");
  try {
    parse_config(text);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("triangle") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected") {
  std::string text = slurp(kConfigPath);
  text += "\nextra_key: 1\n";
  try {
    parse_config(text);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("extra_key") != std::string::npos);
    CHECK(std::string(e.what()).find("unknown key") != std::string::npos);
  }
}

TEST_CASE("missing keys are reported") {
  try {
    parse_config("model:\n  structures:\n    - bodies: {}\nscenario:\n  points: [[0, 0]]\n");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("model.structures[0].revolute") != std::string::npos);
    CHECK(msg.find("missing required key") != std::string::npos);
  }
}

TEST_CASE("CSV output is exact, stable and locale independent") {
  TraceTable t;
  t.columns = {"t_s", "value"};
  t.rows = {{0.0, 1234.56789012345}, {0.001, -1e-7}, {0.002, 3.0}};
  std::ostringstream a, b;
  write_csv(t, a);
  write_csv(t, b);
  CHECK(a.str() == b.str());
  CHECK(a.str() ==
        "t_s,value\n0,1234.56789012\n0.001,-1e-07\n0.002,3\n");
  CHECK(a.str().find(',') != std::string::npos);
  CHECK(a.str().find(';') == std::string::npos);  // no locale list separator

  t.rows.push_back({1.0});  // wrong width
  std::ostringstream c;
  CHECK_THROWS_AS(write_csv(t, c), ModelError);
}

TEST_CASE("state files load with defaults and validation") {
  const LoadedConfig cfg = load_config(kConfigPath);
  {
    std::ofstream out("state_ok.yaml");
    out << "joints:\n  - {q: -2.0, dq: 0.1}\n  - {q: -1.8}\ntool_force: [0, -50, 0]\n";
  }
  const StateFile s = load_state_file("state_ok.yaml", cfg.model.structures.size());
  CHECK(s.joints.size() == 2);
  CHECK(s.joints[0].dq == 0.1);
  CHECK(s.accels[1].ddq == 0.0);
  CHECK(s.tool_wrench(1) == -50.0);

  {
    std::ofstream out("state_bad.yaml");
    out << "joints:\n  - {q: -2.0}\n";  // wrong count
  }
  CHECK_THROWS_AS(load_state_file("state_bad.yaml", 2), ValidationError);
  CHECK_THROWS_AS(load_state_file("no_such_file.yaml", 2), ParseError);
}
