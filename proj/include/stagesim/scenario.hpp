#ifndef STAGESIM_SCENARIO_HPP
#define STAGESIM_SCENARIO_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stagesim/approximation.hpp"
#include "stagesim/constructions.hpp"
#include "stagesim/measure.hpp"
#include "stagesim/reals.hpp"

namespace stagesim {

/// Parsed construction directive; unused fields stay empty.
struct DirectiveData {
  std::string kind;
  std::string id;
  std::string operator_id;
  std::string halting_set_id;
  std::string approximation_id;
  std::string machine_id;
  std::string inner_id;
  std::string outer_id;
  std::string trace_id;  // real id for orchestrations / weight_real
  std::string left_id;
  std::string right_id;
  std::string case_tag;
  std::vector<std::string> machine_ids;
  BitString reserved;
  std::vector<Dyadic> targets;
  Dyadic q;
  int exponent = 0;
  int stages = 0;
};

struct TraceDirective {
  std::string machine_id;  // empty for real traces
  std::string real_id;     // empty for machine traces
  ClassSpec class_spec;
};

struct FaultInjection {
  std::string machine_id;
  BitString input;
  std::string action;  // drop | flip_rule | truncate_output
};

struct VerifyReport {
  std::vector<std::string> lines;
  int violations = 0;
  bool vacuous = false;

  std::string to_text() const;
};

/// A fully loaded scenario: mock worlds, real approximations, construction
/// directives, and output requests. Loading validates the configuration
/// (ConfigErrorError names the offending key); building runs the
/// constructions in order; verify runs every applicable invariant suite.
class Scenario {
 public:
  Scenario() = default;

  static Scenario load_file(const std::string& path);
  static Scenario load_string(const std::string& json_text);

  const std::string& name() const { return name_; }
  int horizon() const { return horizon_; }
  void override_horizon(int horizon);

  /// Runs every construction directive; construction errors propagate.
  void build();
  bool built() const { return built_; }

  /// Writes machine tables (always) and trace CSVs (when requested) into
  /// out_dir; returns the file names written, sorted.
  std::vector<std::string> write_outputs(const std::string& out_dir,
                                         bool with_traces);

  VerifyReport verify();

  const MonotoneMachine* find_machine(const std::string& id) const;
  const std::map<std::string, MonotoneMachine>& machines() const {
    return machines_;
  }

 private:
  struct MachineMeta {
    std::string kind;
    std::string approximation_id;
    std::string inner_id;
    std::string outer_id;
    int exponent = 0;
    std::vector<std::string> listed_ids;
  };
  struct TargetedMeta {
    std::vector<Dyadic> aligned;
    std::vector<Dyadic> requested;
    std::string kind;  // cor34 | cor36
  };
  struct AllocationMeta {
    BitString reserved;
    std::vector<Dyadic> targets;
    std::vector<PrefixFreeSet> stages;
  };
  struct OrchMeta {
    std::string trace_class;
    std::vector<Dyadic> requested;
    std::vector<Dyadic> inner_trace;
    int exponent = 1;
    int maturity = 0;
    std::string case_tag;
  };
  struct RewriteMeta {
    std::string a_id, b_id;
    Dyadic q;
    MonotoneRealApprox q_minus_b, q_minus_a;
  };
  struct KsMeta {
    std::string g_id, a_id;
    int exponent = 0;
  };
  struct ShiftMeta {
    std::string a_id, b_id, g_id;
    MonotoneRealApprox a_shifted, b_shifted;
  };

  void parse(const std::string& json_text);
  void run_directive(const DirectiveData& d);
  void apply_fault_injection();
  const MonotoneRealApprox& real_ref(const std::string& id,
                                     const std::string& key) const;
  const CanonicalApproximation& approx_ref(const std::string& id,
                                           const std::string& key) const;
  std::vector<const MonotoneMachine*> machine_refs(
      const std::vector<std::string>& ids, const std::string& key) const;
  void register_machine(const std::string& id, MonotoneMachine machine,
                        MachineMeta meta);
  int phi_index(const std::string& phi_id) const;

  std::string name_;
  int horizon_ = 1;
  bool built_ = false;

  std::map<std::string, MockHaltingSet> halting_sets_;
  std::map<std::string, MockCEOperator> operators_;
  std::map<std::string, MonotoneRealApprox> reals_;
  std::map<std::string, PhiTable> phis_;
  std::vector<std::string> phi_order_;

  std::vector<DirectiveData> directives_;
  std::vector<TraceDirective> traces_;
  bool traces_explicit_ = false;
  std::optional<FaultInjection> fault_;

  std::map<std::string, CanonicalApproximation> canonicals_;
  std::map<std::string, MonotoneMachine> machines_;
  std::map<std::string, MachineMeta> machine_meta_;
  std::map<std::string, TargetedMeta> targeted_;
  std::map<std::string, AllocationMeta> allocations_;
  std::map<std::string, OrchMeta> orchestrations_;
  std::map<std::string, MonotoneRealApprox> derived_reals_;
  std::map<std::string, RewriteMeta> rewrites_;
  std::map<std::string, KsMeta> ks_results_;
  std::map<std::string, ShiftMeta> shifts_;
};

}  // namespace stagesim

#endif  // STAGESIM_SCENARIO_HPP
