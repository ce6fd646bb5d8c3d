#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "stagesim/stagesim_c.h"

namespace {

namespace fs = std::filesystem;

struct ScopedScenario {
  stagesim_scenario* ptr = nullptr;
  ~ScopedScenario() { stagesim_scenario_free(ptr); }
};

struct ScopedMachine {
  stagesim_machine* ptr = nullptr;
  ~ScopedMachine() { stagesim_machine_free(ptr); }
};

}  // namespace

TEST_CASE("demo listing is stable and nonempty") {
  int n = stagesim_demo_count();
  REQUIRE(n > 0);
  for (int i = 0; i < n; ++i) {
    const char* name = stagesim_demo_name(i);
    REQUIRE(name != nullptr);
    CHECK(std::strlen(name) > 0);
  }
  CHECK(stagesim_demo_name(n) == nullptr);
  CHECK(stagesim_demo_name(-1) == nullptr);
}

TEST_CASE("demos run end to end through the C surface") {
  int n = stagesim_demo_count();
  for (int i = 0; i < n; ++i) {
    std::string name = stagesim_demo_name(i);
    CAPTURE(name);
    ScopedScenario sc;
    REQUIRE(stagesim_scenario_load_demo(name.c_str(), &sc.ptr) == STAGESIM_OK);
    REQUIRE(stagesim_scenario_build(sc.ptr) == STAGESIM_OK);
    int violations = -1;
    CHECK(stagesim_scenario_verify(sc.ptr, nullptr, &violations) == STAGESIM_OK);
    CHECK(violations == 0);
    char buf[256];
    size_t len = stagesim_scenario_report_text(sc.ptr, buf, sizeof buf);
    CHECK(len > 0);
  }
}

TEST_CASE("bad inputs produce config errors and messages") {
  ScopedScenario sc;
  CHECK(stagesim_scenario_load_demo("no_such_demo", &sc.ptr) ==
        STAGESIM_ERR_CONFIG);
  CHECK(std::strlen(stagesim_last_error()) > 0);
  CHECK(stagesim_scenario_load_string("{", &sc.ptr) == STAGESIM_ERR_CONFIG);
  CHECK(stagesim_scenario_load(nullptr, &sc.ptr) ==
        STAGESIM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("construction errors map to their specific codes") {
  ScopedScenario sc;
  const char* cfg = R"({
    "horizon": 3,
    "constructions": [
      {"kind": "allocation", "id": "s", "reserved": "0", "targets": ["3/2^2"]}
    ]
  })";
  REQUIRE(stagesim_scenario_load_string(cfg, &sc.ptr) == STAGESIM_OK);
  CHECK(stagesim_scenario_build(sc.ptr) == STAGESIM_ERR_CAPACITY_EXCEEDED);
}

TEST_CASE("fault injection is reported through the verify status") {
  const char* cfg = R"({
    "horizon": 6,
    "constructions": [
      {"kind": "empty_approximation", "id": "qe", "stages": 6},
      {"kind": "totality_machine", "id": "t", "approximation": "qe", "stages": 6},
      {"kind": "empty_machine", "id": "o", "stages": 6},
      {"kind": "splice", "id": "sp", "exponent": 2, "inner": "t", "outer": "o"}
    ],
    "fault_injection": {"machine": "sp", "input": "0010", "action": "drop"}
  })";
  ScopedScenario sc;
  REQUIRE(stagesim_scenario_load_string(cfg, &sc.ptr) == STAGESIM_OK);
  REQUIRE(stagesim_scenario_build(sc.ptr) == STAGESIM_OK);
  int violations = 0;
  CHECK(stagesim_scenario_verify(sc.ptr, nullptr, &violations) ==
        STAGESIM_ERR_VERIFY);
  CHECK(violations > 0);
}

TEST_CASE("machine handles load CSV tables and expose measures") {
  fs::path dir = fs::temp_directory_path() / "stagesim_capi";
  fs::remove_all(dir);
  fs::create_directories(dir);

  ScopedScenario sc;
  REQUIRE(stagesim_scenario_load_demo("splice_basic", &sc.ptr) == STAGESIM_OK);
  REQUIRE(stagesim_scenario_build(sc.ptr) == STAGESIM_OK);
  REQUIRE(stagesim_scenario_write(sc.ptr, dir.string().c_str(), 0) ==
          STAGESIM_OK);

  ScopedMachine m;
  fs::path csv = dir / "sp.machine.csv";
  REQUIRE(stagesim_machine_load_csv(csv.string().c_str(), "sp", &m.ptr) ==
          STAGESIM_OK);
  CHECK(stagesim_machine_horizon(m.ptr) == 6);
  CHECK(stagesim_machine_entry_count(m.ptr) > 0);
  char buf[64];
  REQUIRE(stagesim_machine_stage_measure(m.ptr, "TOTAL", 3, buf, sizeof buf) ==
          STAGESIM_OK);
  CHECK(std::string(buf) == "1/2^2");
  CHECK(stagesim_machine_stage_measure(m.ptr, "TOTAL", 99, buf, sizeof buf) ==
        STAGESIM_ERR_HORIZON_EXCEEDED);
  CHECK(stagesim_machine_stage_measure(m.ptr, "BOGUS", 1, buf, sizeof buf) ==
        STAGESIM_ERR_INVALID_ARGUMENT);

  // A corrupted table is rejected by the loader.
  fs::path bad = dir / "bad.csv";
  {
    std::ofstream out(bad);
    out << "stage,input,output,rule\n1,0,1,copy\n2,01,00,copy\n";
  }
  ScopedMachine broken;
  CHECK(stagesim_machine_load_csv(bad.string().c_str(), "bad", &broken.ptr) ==
        STAGESIM_ERR_MONOTONICITY_BREAK);
  fs::remove_all(dir);
}

TEST_CASE("borrowed scenario machines are queryable") {
  ScopedScenario sc;
  REQUIRE(stagesim_scenario_load_demo("computable_prob", &sc.ptr) == STAGESIM_OK);
  REQUIRE(stagesim_scenario_build(sc.ptr) == STAGESIM_OK);
  const stagesim_machine* m = nullptr;
  REQUIRE(stagesim_scenario_machine(sc.ptr, "c34", &m) == STAGESIM_OK);
  CHECK(stagesim_machine_horizon(m) == 4);
  char buf[64];
  REQUIRE(stagesim_machine_stage_measure(m, "ENDS_IN_ZEROS",
                                         stagesim_machine_horizon(m), buf,
                                         sizeof buf) == STAGESIM_OK);
  CHECK(std::string(buf) == "3/2^4");
  stagesim_machine_free(const_cast<stagesim_machine*>(m));
}
