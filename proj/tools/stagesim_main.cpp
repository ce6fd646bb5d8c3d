// stagesim command-line front end. Talks to the core exclusively through
// the C API, the same surface other language bindings would use.
//
// Exit codes: 0 ok, 1 verification failure, 2 config error,
// 3 construction error.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stagesim/stagesim_c.h"

namespace {

int exit_code_for(stagesim_status status) {
  switch (status) {
    case STAGESIM_OK:
      return 0;
    case STAGESIM_ERR_VERIFY:
      return 1;
    case STAGESIM_ERR_CONFIG:
    case STAGESIM_ERR_IO:
      return 2;
    default:
      return 3;
  }
}

int fail(stagesim_status status) {
  std::fprintf(stderr, "error: %s\n", stagesim_last_error());
  return exit_code_for(status);
}

struct ScenarioHandle {
  stagesim_scenario* ptr = nullptr;
  ~ScenarioHandle() { stagesim_scenario_free(ptr); }
};

int load_scenario(const std::string& config, const std::string& demo_name,
                  int horizon, ScenarioHandle& handle) {
  stagesim_status st = demo_name.empty()
                           ? stagesim_scenario_load(config.c_str(), &handle.ptr)
                           : stagesim_scenario_load_demo(demo_name.c_str(),
                                                         &handle.ptr);
  if (st != STAGESIM_OK) return fail(st);
  if (horizon > 0) {
    st = stagesim_scenario_set_horizon(handle.ptr, horizon);
    if (st != STAGESIM_OK) return fail(st);
  }
  return -1;  // keep going
}

int run_verify(stagesim_scenario* scenario, const std::string& out_dir) {
  std::string report_path;
  if (!out_dir.empty()) report_path = out_dir + "/verify_report.txt";
  int violations = 0;
  stagesim_status st = stagesim_scenario_verify(
      scenario, report_path.empty() ? nullptr : report_path.c_str(),
      &violations);
  std::vector<char> buf(1 << 20);
  stagesim_scenario_report_text(scenario, buf.data(), buf.size());
  std::fputs(buf.data(), stdout);
  if (st == STAGESIM_OK || st == STAGESIM_ERR_VERIFY) {
    return violations == 0 ? 0 : 1;
  }
  return fail(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stagesim: stagewise machine constructions over exact dyadic measure"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  int horizon = 0;
  unsigned seed = 0;

  auto add_common = [&](CLI::App* cmd, bool config_required) {
    if (config_required) {
      cmd->add_option("--config", config, "scenario config (JSON)")->required();
    }
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--horizon", horizon, "override the scenario horizon");
    cmd->add_option("--seed", seed,
                    "reserved: constructions are deterministic");
  };

  CLI::App* construct = app.add_subcommand(
      "construct", "build the scenario and write machine tables");
  add_common(construct, true);

  CLI::App* trace = app.add_subcommand(
      "trace", "build the scenario and write machine tables and traces");
  add_common(trace, true);

  CLI::App* verify = app.add_subcommand(
      "verify", "build the scenario and run every applicable invariant suite");
  add_common(verify, true);

  CLI::App* demo = app.add_subcommand("demo", "run a built-in demo scenario");
  bool list = false;
  std::string demo_name;
  demo->add_flag("--list", list, "list demo names");
  demo->add_option("--name", demo_name, "demo to run");
  demo->add_option("--out", out_dir, "output directory");
  demo->add_option("--horizon", horizon, "override the scenario horizon");
  demo->add_option("--seed", seed, "reserved: constructions are deterministic");

  CLI11_PARSE(app, argc, argv);

  if (demo->parsed()) {
    if (list) {
      for (int i = 0; i < stagesim_demo_count(); ++i) {
        std::printf("%s\n", stagesim_demo_name(i));
      }
      return 0;
    }
    if (demo_name.empty()) {
      std::fprintf(stderr, "error: demo requires --list or --name\n");
      return 2;
    }
    ScenarioHandle handle;
    int rc = load_scenario("", demo_name, horizon, handle);
    if (rc >= 0) return rc;
    stagesim_status st = stagesim_scenario_build(handle.ptr);
    if (st != STAGESIM_OK) return fail(st);
    if (!out_dir.empty()) {
      st = stagesim_scenario_write(handle.ptr, out_dir.c_str(), 1);
      if (st != STAGESIM_OK) return fail(st);
    }
    return run_verify(handle.ptr, out_dir);
  }

  ScenarioHandle handle;
  int rc = load_scenario(config, "", horizon, handle);
  if (rc >= 0) return rc;
  stagesim_status st = stagesim_scenario_build(handle.ptr);
  if (st != STAGESIM_OK) return fail(st);

  if (construct->parsed() || trace->parsed()) {
    if (out_dir.empty()) {
      std::fprintf(stderr, "error: --out is required\n");
      return 2;
    }
    st = stagesim_scenario_write(handle.ptr, out_dir.c_str(),
                                 trace->parsed() ? 1 : 0);
    if (st != STAGESIM_OK) return fail(st);
    return 0;
  }
  return run_verify(handle.ptr, out_dir);
}
