#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stagesim/demos.hpp"
#include "stagesim/errors.hpp"
#include "stagesim/scenario.hpp"

using namespace stagesim;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("stagesim_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("every demo builds, verifies clean, and rewrites byte-identically") {
  for (const std::string& name : demo_names()) {
    CAPTURE(name);
    Scenario sc = Scenario::load_string(demo_config(name));
    sc.build();
    VerifyReport report = sc.verify();
    CHECK_MESSAGE(report.violations == 0, report.to_text());
    CHECK(!report.vacuous);

    fs::path dir1 = fresh_dir(name + "_1");
    fs::path dir2 = fresh_dir(name + "_2");
    auto files1 = sc.write_outputs(dir1.string(), true);
    auto files2 = sc.write_outputs(dir2.string(), true);
    CHECK(files1 == files2);
    CHECK(!files1.empty());
    for (const std::string& f : files1) {
      CHECK(slurp(dir1 / f) == slurp(dir2 / f));
    }
    // A separately loaded scenario reproduces the same bytes.
    Scenario again = Scenario::load_string(demo_config(name));
    again.build();
    fs::path dir3 = fresh_dir(name + "_3");
    auto files3 = again.write_outputs(dir3.string(), true);
    REQUIRE(files1 == files3);
    for (const std::string& f : files1) {
      CHECK(slurp(dir1 / f) == slurp(dir3 / f));
    }
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    fs::remove_all(dir3);
  }
}

TEST_CASE("config errors name the offending key") {
  CHECK_THROWS_AS(Scenario::load_string("not json"), ConfigErrorError);
  try {
    Scenario::load_string(R"({"horizon": 0})");
    FAIL("expected ConfigErrorError");
  } catch (const ConfigErrorError& e) {
    CHECK(std::string(e.what()).find("horizon") != std::string::npos);
  }
  try {
    Scenario::load_string(R"({
      "horizon": 3,
      "constructions": [{"kind": "padding_machine", "id": "m"}]
    })");
    FAIL("expected ConfigErrorError");
  } catch (const ConfigErrorError& e) {
    CHECK(std::string(e.what()).find("approximation") != std::string::npos);
  }
  try {
    Scenario::load_string(R"({
      "horizon": 3,
      "reals": {"g": {"values": ["nonsense"]}}
    })");
    FAIL("expected ConfigErrorError");
  } catch (const ConfigErrorError& e) {
    CHECK(std::string(e.what()).find("reals.g.values") != std::string::npos);
  }
}

TEST_CASE("duplicate identifiers are rejected") {
  CHECK_THROWS_AS(Scenario::load_string(R"({
    "horizon": 2,
    "constructions": [
      {"kind": "empty_machine", "id": "m"},
      {"kind": "empty_machine", "id": "m"}
    ]
  })"),
                  ConfigErrorError);
}

TEST_CASE("an empty scenario verifies vacuously with a warning") {
  Scenario sc = Scenario::load_string(R"({"horizon": 2})");
  sc.build();
  VerifyReport report = sc.verify();
  CHECK(report.violations == 0);
  CHECK(report.vacuous);
  CHECK(report.to_text().find("WARNING") != std::string::npos);
}

TEST_CASE("construction errors surface with their module error") {
  Scenario sc = Scenario::load_string(R"({
    "horizon": 3,
    "constructions": [
      {"kind": "allocation", "id": "s", "reserved": "0", "targets": ["3/2^2"]}
    ]
  })");
  CHECK_THROWS_AS(sc.build(), CapacityExceededError);
}

TEST_CASE("fault injection makes verification fail with a localized report") {
  std::string cfg = demo_config("padding_basic");
  // Tamper with one padded entry of the machine m.
  std::string tampered = cfg;
  std::string addition =
      ",\n  \"fault_injection\": {\"machine\": \"m\", \"input\": \"0000000\","
      " \"action\": \"flip_rule\"}\n}";
  tampered.replace(tampered.rfind('}'), 1, addition);
  Scenario sc = Scenario::load_string(tampered);
  sc.build();
  VerifyReport report = sc.verify();
  CHECK(report.violations > 0);
  bool localized = false;
  for (const std::string& line : report.lines) {
    if (line.find("VIOLATION") != std::string::npos) localized = true;
  }
  CHECK(localized);
}

TEST_CASE("horizon override is rejected below 1") {
  Scenario sc = Scenario::load_string(R"({"horizon": 2})");
  CHECK_THROWS_AS(sc.override_horizon(0), ConfigErrorError);
}

TEST_CASE("weight_real traces are emitted for canonical worlds") {
  Scenario sc = Scenario::load_string(demo_config("padding_basic"));
  sc.build();
  fs::path dir = fresh_dir("wr");
  auto files = sc.write_outputs(dir.string(), true);
  bool found = false;
  for (const std::string& f : files) {
    if (f == "wr.real.csv") found = true;
  }
  CHECK(found);
  std::string csv = slurp(dir / "wr.real.csv");
  CHECK(csv.find("stage,value") == 0);
  CHECK(csv.find("3/2^2") != std::string::npos);  // final weight 3/4
  fs::remove_all(dir);
}
