#include "stagesim/stagesim_c.h"

#include <cstring>
#include <fstream>
#include <string>

#include "stagesim/demos.hpp"
#include "stagesim/errors.hpp"
#include "stagesim/machine.hpp"
#include "stagesim/measure.hpp"
#include "stagesim/scenario.hpp"

namespace {

thread_local std::string g_last_error = "";

stagesim_status status_from(const stagesim::Error& e) {
  using stagesim::ErrorCode;
  switch (e.code()) {
    case ErrorCode::ConfigError:
      return STAGESIM_ERR_CONFIG;
    case ErrorCode::PrefixConflict:
      return STAGESIM_ERR_PREFIX_CONFLICT;
    case ErrorCode::CapacityExceeded:
      return STAGESIM_ERR_CAPACITY_EXCEEDED;
    case ErrorCode::NonMonotoneTarget:
      return STAGESIM_ERR_NON_MONOTONE_TARGET;
    case ErrorCode::NotPrefixFreeLimit:
      return STAGESIM_ERR_NOT_PREFIX_FREE_LIMIT;
    case ErrorCode::QTooSmall:
      return STAGESIM_ERR_Q_TOO_SMALL;
    case ErrorCode::NoExponent:
      return STAGESIM_ERR_NO_EXPONENT;
    case ErrorCode::MonotonicityBreak:
      return STAGESIM_ERR_MONOTONICITY_BREAK;
    case ErrorCode::ConeNotEmpty:
      return STAGESIM_ERR_CONE_NOT_EMPTY;
    case ErrorCode::TargetOutOfRange:
      return STAGESIM_ERR_TARGET_OUT_OF_RANGE;
    case ErrorCode::NonMonotoneOuter:
      return STAGESIM_ERR_NON_MONOTONE_OUTER;
    case ErrorCode::HorizonExceeded:
      return STAGESIM_ERR_HORIZON_EXCEEDED;
    case ErrorCode::InvalidArgument:
      return STAGESIM_ERR_INVALID_ARGUMENT;
    case ErrorCode::IoError:
      return STAGESIM_ERR_IO;
    default:
      return STAGESIM_ERR_CONSTRUCTION;
  }
}

template <typename Fn>
stagesim_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const stagesim::Error& e) {
    g_last_error = e.what();
    return status_from(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return STAGESIM_ERR_CONSTRUCTION;
  } catch (...) {
    g_last_error = "unknown error";
    return STAGESIM_ERR_CONSTRUCTION;
  }
}

size_t copy_out(const std::string& text, char* buf, size_t buf_len) {
  if (buf != nullptr && buf_len > 0) {
    size_t n = std::min(buf_len - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
  }
  return text.size();
}

}  // namespace

struct stagesim_scenario {
  stagesim::Scenario scenario;
  std::string last_report;
};

struct stagesim_machine {
  stagesim::MonotoneMachine machine;
  bool owned = true;
};

extern "C" {

const char* stagesim_last_error(void) { return g_last_error.c_str(); }

stagesim_status stagesim_scenario_load(const char* config_path,
                                       stagesim_scenario** out) {
  return guarded([&]() {
    if (config_path == nullptr || out == nullptr) {
      throw stagesim::InvalidArgumentError("null argument");
    }
    auto* handle = new stagesim_scenario{
        stagesim::Scenario::load_file(config_path), {}};
    *out = handle;
    return STAGESIM_OK;
  });
}

stagesim_status stagesim_scenario_load_string(const char* config_json,
                                              stagesim_scenario** out) {
  return guarded([&]() {
    if (config_json == nullptr || out == nullptr) {
      throw stagesim::InvalidArgumentError("null argument");
    }
    auto* handle = new stagesim_scenario{
        stagesim::Scenario::load_string(config_json), {}};
    *out = handle;
    return STAGESIM_OK;
  });
}

stagesim_status stagesim_scenario_load_demo(const char* demo_name,
                                            stagesim_scenario** out) {
  return guarded([&]() {
    if (demo_name == nullptr || out == nullptr) {
      throw stagesim::InvalidArgumentError("null argument");
    }
    auto* handle = new stagesim_scenario{
        stagesim::Scenario::load_string(stagesim::demo_config(demo_name)), {}};
    *out = handle;
    return STAGESIM_OK;
  });
}

void stagesim_scenario_free(stagesim_scenario* scenario) { delete scenario; }

stagesim_status stagesim_scenario_set_horizon(stagesim_scenario* scenario,
                                              int horizon) {
  return guarded([&]() {
    if (scenario == nullptr) {
      throw stagesim::InvalidArgumentError("null scenario");
    }
    scenario->scenario.override_horizon(horizon);
    return STAGESIM_OK;
  });
}

stagesim_status stagesim_scenario_build(stagesim_scenario* scenario) {
  return guarded([&]() {
    if (scenario == nullptr) {
      throw stagesim::InvalidArgumentError("null scenario");
    }
    scenario->scenario.build();
    return STAGESIM_OK;
  });
}

stagesim_status stagesim_scenario_write(stagesim_scenario* scenario,
                                        const char* out_dir, int with_traces) {
  return guarded([&]() {
    if (scenario == nullptr || out_dir == nullptr) {
      throw stagesim::InvalidArgumentError("null argument");
    }
    scenario->scenario.write_outputs(out_dir, with_traces != 0);
    return STAGESIM_OK;
  });
}

stagesim_status stagesim_scenario_verify(stagesim_scenario* scenario,
                                         const char* report_path,
                                         int* violations_out) {
  return guarded([&]() {
    if (scenario == nullptr) {
      throw stagesim::InvalidArgumentError("null scenario");
    }
    stagesim::VerifyReport report = scenario->scenario.verify();
    scenario->last_report = report.to_text();
    if (report_path != nullptr) {
      std::ofstream out(report_path, std::ios::binary);
      if (!out) {
        throw stagesim::IoErrorError(std::string("cannot write report to ") +
                                     report_path);
      }
      out << scenario->last_report;
    }
    if (violations_out != nullptr) *violations_out = report.violations;
    if (report.violations > 0) {
      g_last_error = "verification reported " +
                     std::to_string(report.violations) + " violation(s)";
      return STAGESIM_ERR_VERIFY;
    }
    return STAGESIM_OK;
  });
}

size_t stagesim_scenario_report_text(const stagesim_scenario* scenario,
                                     char* buf, size_t buf_len) {
  if (scenario == nullptr) return copy_out("", buf, buf_len);
  return copy_out(scenario->last_report, buf, buf_len);
}

int stagesim_demo_count(void) {
  return static_cast<int>(stagesim::demo_names().size());
}

const char* stagesim_demo_name(int index) {
  static thread_local std::string name;
  auto names = stagesim::demo_names();
  if (index < 0 || index >= static_cast<int>(names.size())) return nullptr;
  name = names[static_cast<std::size_t>(index)];
  return name.c_str();
}

stagesim_status stagesim_machine_load_csv(const char* csv_path,
                                          const char* machine_id,
                                          stagesim_machine** out) {
  return guarded([&]() {
    if (csv_path == nullptr || machine_id == nullptr || out == nullptr) {
      throw stagesim::InvalidArgumentError("null argument");
    }
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) {
      throw stagesim::IoErrorError(std::string("cannot open ") + csv_path);
    }
    auto* handle = new stagesim_machine{
        stagesim::MonotoneMachine::load_csv(in, machine_id), true};
    *out = handle;
    return STAGESIM_OK;
  });
}

stagesim_status stagesim_scenario_machine(stagesim_scenario* scenario,
                                          const char* machine_id,
                                          const stagesim_machine** out) {
  return guarded([&]() {
    if (scenario == nullptr || machine_id == nullptr || out == nullptr) {
      throw stagesim::InvalidArgumentError("null argument");
    }
    const stagesim::MonotoneMachine* m =
        scenario->scenario.find_machine(machine_id);
    if (m == nullptr) {
      throw stagesim::InvalidArgumentError(std::string("unknown machine ") +
                                           machine_id);
    }
    // Borrowed view: copy into an owned handle the caller must free.
    auto* handle = new stagesim_machine{*m, true};
    *out = handle;
    return STAGESIM_OK;
  });
}

void stagesim_machine_free(stagesim_machine* machine) { delete machine; }

int stagesim_machine_horizon(const stagesim_machine* machine) {
  return machine == nullptr ? -1 : machine->machine.horizon();
}

size_t stagesim_machine_entry_count(const stagesim_machine* machine) {
  return machine == nullptr ? 0 : machine->machine.table().size();
}

stagesim_status stagesim_machine_stage_measure(const stagesim_machine* machine,
                                               const char* class_name,
                                               int stage, char* buf,
                                               size_t buf_len) {
  return guarded([&]() {
    if (machine == nullptr || class_name == nullptr) {
      throw stagesim::InvalidArgumentError("null argument");
    }
    stagesim::ClassSpec cls;
    std::string name(class_name);
    if (name == "TOTAL") {
      cls = stagesim::ClassSpec::total();
    } else if (name == "ENDS_IN_ZEROS") {
      cls = stagesim::ClassSpec::ends_in_zeros();
    } else {
      throw stagesim::InvalidArgumentError("unknown class " + name);
    }
    stagesim::Dyadic m = stagesim::stage_measure(machine->machine, cls, stage);
    copy_out(m.to_string(), buf, buf_len);
    return STAGESIM_OK;
  });
}

}  // extern "C"
