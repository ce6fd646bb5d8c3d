#include "stagesim/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stagesim/errors.hpp"

namespace stagesim {

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& key, const std::string& what) {
  throw ConfigErrorError(key + ": " + what);
}

const json& require_field(const json& j, const std::string& key,
                          const std::string& ctx) {
  if (!j.contains(key)) config_fail(ctx + "." + key, "missing");
  return j.at(key);
}

std::string require_string(const json& j, const std::string& key,
                           const std::string& ctx) {
  const json& v = require_field(j, key, ctx);
  if (!v.is_string()) config_fail(ctx + "." + key, "must be a string");
  return v.get<std::string>();
}

int require_int(const json& j, const std::string& key, const std::string& ctx) {
  const json& v = require_field(j, key, ctx);
  if (!v.is_number_integer()) config_fail(ctx + "." + key, "must be an integer");
  return v.get<int>();
}

int optional_int(const json& j, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<int>();
}

std::string optional_string(const json& j, const std::string& key) {
  if (!j.contains(key)) return {};
  return j.at(key).get<std::string>();
}

Dyadic parse_dyadic(const json& v, const std::string& ctx) {
  if (!v.is_string()) config_fail(ctx, "dyadics are strings like \"3/2^2\"");
  auto d = Dyadic::parse(v.get<std::string>());
  if (!d) config_fail(ctx, "cannot parse dyadic \"" + v.get<std::string>() + "\"");
  return *d;
}

std::vector<Dyadic> parse_dyadic_list(const json& v, const std::string& ctx) {
  if (!v.is_array()) config_fail(ctx, "must be a list");
  std::vector<Dyadic> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(parse_dyadic(v[i], ctx + "[" + std::to_string(i) + "]"));
  }
  return out;
}

BitString parse_bits(const json& v, const std::string& ctx) {
  if (!v.is_string()) config_fail(ctx, "must be a bit string");
  try {
    return BitString(v.get<std::string>());
  } catch (const Error& e) {
    config_fail(ctx, e.what());
  }
}

std::string sanitize(const std::string& class_name) {
  std::string out;
  for (char c : class_name) {
    if (c == '(' || c == ',') {
      out.push_back('_');
    } else if (c == ')') {
      // drop
    } else {
      out.push_back(c);
    }
  }
  return out;
}

void write_real_csv(std::ostream& out, const MonotoneRealApprox& r) {
  out << "stage,value\n";
  for (std::size_t s = 0; s < r.values.size(); ++s) {
    out << s << ',' << r.values[s].to_string() << '\n';
  }
}

void write_set_txt(std::ostream& out, const PrefixFreeSet& set) {
  for (const BitString& m : set.members()) out << m.str() << '\n';
}

}  // namespace

std::string VerifyReport::to_text() const {
  std::ostringstream out;
  for (const std::string& line : lines) out << line << '\n';
  out << (violations == 0 ? "RESULT pass" : "RESULT fail") << " ("
      << violations << " violation" << (violations == 1 ? "" : "s") << ")\n";
  return out.str();
}

Scenario Scenario::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoErrorError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_string(buf.str());
}

Scenario Scenario::load_string(const std::string& json_text) {
  Scenario sc;
  sc.parse(json_text);
  return sc;
}

void Scenario::override_horizon(int horizon) {
  if (horizon < 1) config_fail("horizon", "must be >= 1");
  horizon_ = horizon;
}

void Scenario::parse(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    config_fail("(config)", e.what());
  }
  if (!root.is_object()) config_fail("(config)", "must be a JSON object");

  name_ = optional_string(root, "name");
  if (!root.contains("horizon")) config_fail("horizon", "missing");
  horizon_ = require_int(root, "horizon", "(config)");
  if (horizon_ < 1) config_fail("horizon", "must be >= 1");

  std::set<std::string> used_ids;
  auto claim_id = [&used_ids](const std::string& id, const std::string& ctx) {
    if (id.empty()) config_fail(ctx, "identifier must be nonempty");
    for (char c : id) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
        config_fail(ctx, "identifier may contain only [A-Za-z0-9_-]");
      }
    }
    if (!used_ids.insert(id).second) config_fail(ctx, "duplicate id " + id);
  };

  if (root.contains("halting_sets")) {
    const json& hs = root.at("halting_sets");
    if (!hs.is_object()) config_fail("halting_sets", "must be an object");
    for (auto it = hs.begin(); it != hs.end(); ++it) {
      const std::string ctx = "halting_sets." + it.key();
      claim_id(it.key(), ctx);
      MockHaltingSet h;
      const json& events = require_field(*it, "events", ctx);
      if (!events.is_array()) config_fail(ctx + ".events", "must be a list");
      for (std::size_t i = 0; i < events.size(); ++i) {
        const json& ev = events[i];
        if (!ev.is_array() || ev.size() != 2) {
          config_fail(ctx + ".events[" + std::to_string(i) + "]",
                      "must be [stage, number]");
        }
        h.events.push_back({ev[0].get<int>(), ev[1].get<int>()});
      }
      int last_stage = h.events.empty() ? 0 : h.events.back().stage;
      h.horizon = optional_int(*it, "horizon", std::max(horizon_, last_stage));
      try {
        h.validate();
      } catch (const Error& e) {
        config_fail(ctx, e.what());
      }
      halting_sets_.emplace(it.key(), std::move(h));
    }
  }

  if (root.contains("operators")) {
    const json& ops = root.at("operators");
    if (!ops.is_object()) config_fail("operators", "must be an object");
    for (auto it = ops.begin(); it != ops.end(); ++it) {
      const std::string ctx = "operators." + it.key();
      claim_id(it.key(), ctx);
      MockCEOperator op;
      const json& axioms = require_field(*it, "axioms", ctx);
      if (!axioms.is_array()) config_fail(ctx + ".axioms", "must be a list");
      for (std::size_t i = 0; i < axioms.size(); ++i) {
        const std::string actx = ctx + ".axioms[" + std::to_string(i) + "]";
        const json& ax = axioms[i];
        Axiom a;
        a.string = parse_bits(require_field(ax, "string", actx), actx + ".string");
        a.appearance_stage = require_int(ax, "stage", actx);
        if (ax.contains("in")) {
          for (const json& n : ax.at("in")) a.condition.required_in.insert(n.get<int>());
        }
        if (ax.contains("out")) {
          for (const json& n : ax.at("out")) a.condition.required_out.insert(n.get<int>());
        }
        op.axioms.push_back(std::move(a));
      }
      try {
        op.validate();
      } catch (const Error& e) {
        config_fail(ctx, e.what());
      }
      operators_.emplace(it.key(), std::move(op));
    }
  }

  if (root.contains("reals")) {
    const json& rs = root.at("reals");
    if (!rs.is_object()) config_fail("reals", "must be an object");
    for (auto it = rs.begin(); it != rs.end(); ++it) {
      const std::string ctx = "reals." + it.key();
      claim_id(it.key(), ctx);
      MonotoneRealApprox r;
      std::string dir = optional_string(*it, "direction");
      if (dir.empty() || dir == "increasing") {
        r.direction = Direction::Increasing;
      } else if (dir == "decreasing") {
        r.direction = Direction::Decreasing;
      } else {
        config_fail(ctx + ".direction", "must be increasing or decreasing");
      }
      r.values = parse_dyadic_list(require_field(*it, "values", ctx),
                                   ctx + ".values");
      if (it->contains("limit")) {
        r.declared_limit = parse_dyadic(it->at("limit"), ctx + ".limit");
      }
      try {
        r.validate();
      } catch (const Error& e) {
        config_fail(ctx + ".values", e.what());
      }
      for (const Dyadic& v : r.values) {
        if (v.is_negative() || v > Dyadic(1)) {
          config_fail(ctx + ".values", "values must lie in [0, 1]");
        }
      }
      reals_.emplace(it.key(), std::move(r));
    }
  }

  if (root.contains("phi_tables")) {
    const json& ph = root.at("phi_tables");
    if (!ph.is_object()) config_fail("phi_tables", "must be an object");
    for (auto it = ph.begin(); it != ph.end(); ++it) {
      const std::string ctx = "phi_tables." + it.key();
      claim_id(it.key(), ctx);
      if (!it->is_string()) config_fail(ctx, "must be a pattern string over 0/1/x");
      try {
        phis_.emplace(it.key(), PhiTable(it->get<std::string>()));
      } catch (const Error& e) {
        config_fail(ctx, e.what());
      }
      phi_order_.push_back(it.key());
    }
    std::sort(phi_order_.begin(), phi_order_.end());
  }

  static const std::set<std::string> kKinds = {
      "canonical",      "empty_approximation",
      "weight_real",    "padding_machine",
      "totality_machine", "empty_machine",
      "cone_restrict",  "splice",
      "universal",      "allocation",
      "cor34",          "cor36",
      "universal_leftce", "universal_dce",
      "rewrite_difference", "ks_search",
      "shift_common"};

  if (root.contains("constructions")) {
    const json& cs = root.at("constructions");
    if (!cs.is_array()) config_fail("constructions", "must be a list");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string ctx = "constructions[" + std::to_string(i) + "]";
      const json& c = cs[i];
      DirectiveData d;
      d.kind = require_string(c, "kind", ctx);
      if (!kKinds.count(d.kind)) config_fail(ctx + ".kind", "unknown kind " + d.kind);
      d.id = require_string(c, "id", ctx);
      claim_id(d.id, ctx + ".id");
      d.stages = optional_int(c, "stages", 0);  // 0: scenario horizon at build
      if (d.kind == "canonical") {
        d.operator_id = require_string(c, "operator", ctx);
        d.halting_set_id = require_string(c, "halting_set", ctx);
      } else if (d.kind == "weight_real" || d.kind == "padding_machine" ||
                 d.kind == "totality_machine") {
        d.approximation_id = require_string(c, "approximation", ctx);
      } else if (d.kind == "cone_restrict") {
        d.machine_id = require_string(c, "machine", ctx);
        d.reserved = parse_bits(require_field(c, "reserved", ctx), ctx + ".reserved");
      } else if (d.kind == "splice") {
        d.exponent = require_int(c, "exponent", ctx);
        d.inner_id = require_string(c, "inner", ctx);
        d.outer_id = require_string(c, "outer", ctx);
      } else if (d.kind == "universal") {
        const json& ms = require_field(c, "machines", ctx);
        if (!ms.is_array()) config_fail(ctx + ".machines", "must be a list");
        for (const json& m : ms) d.machine_ids.push_back(m.get<std::string>());
      } else if (d.kind == "allocation" || d.kind == "cor34" ||
                 d.kind == "cor36") {
        d.reserved = parse_bits(require_field(c, "reserved", ctx), ctx + ".reserved");
        d.targets = parse_dyadic_list(require_field(c, "targets", ctx),
                                      ctx + ".targets");
      } else if (d.kind == "universal_leftce") {
        d.trace_id = require_string(c, "trace", ctx);
        if (c.contains("base")) {
          for (const json& m : c.at("base")) d.machine_ids.push_back(m.get<std::string>());
        }
      } else if (d.kind == "universal_dce") {
        d.left_id = require_string(c, "left", ctx);
        d.right_id = require_string(c, "right", ctx);
        d.case_tag = require_string(c, "case_tag", ctx);
        if (d.case_tag != "left_ce" && d.case_tag != "right_ce" &&
            d.case_tag != "not_random") {
          config_fail(ctx + ".case_tag",
                      "must be left_ce, right_ce or not_random");
        }
        if (c.contains("base")) {
          for (const json& m : c.at("base")) d.machine_ids.push_back(m.get<std::string>());
        }
      } else if (d.kind == "rewrite_difference") {
        d.left_id = require_string(c, "a", ctx);
        d.right_id = require_string(c, "b", ctx);
        d.q = parse_dyadic(require_field(c, "q", ctx), ctx + ".q");
      } else if (d.kind == "ks_search") {
        d.left_id = require_string(c, "g", ctx);
        d.right_id = require_string(c, "a", ctx);
      } else if (d.kind == "shift_common") {
        d.left_id = require_string(c, "a", ctx);
        d.right_id = require_string(c, "b", ctx);
        d.trace_id = require_string(c, "g", ctx);
      }
      directives_.push_back(std::move(d));
    }
  }

  if (root.contains("traces")) {
    traces_explicit_ = true;
    const json& ts = root.at("traces");
    if (!ts.is_array()) config_fail("traces", "must be a list");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const std::string ctx = "traces[" + std::to_string(i) + "]";
      const json& t = ts[i];
      TraceDirective td;
      if (t.contains("real")) {
        td.real_id = require_string(t, "real", ctx);
      } else {
        td.machine_id = require_string(t, "machine", ctx);
        std::string cls = require_string(t, "class", ctx);
        if (cls == "TOTAL") {
          td.class_spec = ClassSpec::total();
        } else if (cls == "ENDS_IN_ZEROS") {
          td.class_spec = ClassSpec::ends_in_zeros();
        } else if (cls == "MATCHES_PHI") {
          std::string phi_id = require_string(t, "phi", ctx);
          if (!phis_.count(phi_id)) config_fail(ctx + ".phi", "unknown phi table " + phi_id);
          td.class_spec = ClassSpec::matches_phi(phi_index(phi_id), phis_.at(phi_id));
        } else if (cls == "IN_ML_TEST") {
          std::string phi_id = require_string(t, "phi", ctx);
          if (!phis_.count(phi_id)) config_fail(ctx + ".phi", "unknown phi table " + phi_id);
          int stage = require_int(t, "stage", ctx);
          td.class_spec =
              ClassSpec::in_ml_test(phi_index(phi_id), stage, phis_.at(phi_id));
        } else {
          config_fail(ctx + ".class", "unknown class " + cls);
        }
      }
      traces_.push_back(std::move(td));
    }
  }

  if (root.contains("fault_injection")) {
    const json& f = root.at("fault_injection");
    const std::string ctx = "fault_injection";
    FaultInjection fi;
    fi.machine_id = require_string(f, "machine", ctx);
    fi.input = parse_bits(require_field(f, "input", ctx), ctx + ".input");
    fi.action = require_string(f, "action", ctx);
    if (fi.action != "drop" && fi.action != "flip_rule" &&
        fi.action != "truncate_output") {
      config_fail(ctx + ".action", "must be drop, flip_rule or truncate_output");
    }
    fault_ = std::move(fi);
  }
}

int Scenario::phi_index(const std::string& phi_id) const {
  auto it = std::find(phi_order_.begin(), phi_order_.end(), phi_id);
  if (it == phi_order_.end()) {
    throw ConfigErrorError("phi table " + phi_id + " is not declared");
  }
  return static_cast<int>(it - phi_order_.begin());
}

const MonotoneRealApprox& Scenario::real_ref(const std::string& id,
                                             const std::string& key) const {
  auto it = reals_.find(id);
  if (it != reals_.end()) return it->second;
  auto dit = derived_reals_.find(id);
  if (dit != derived_reals_.end()) return dit->second;
  config_fail(key, "unknown real approximation " + id);
}

const CanonicalApproximation& Scenario::approx_ref(
    const std::string& id, const std::string& key) const {
  auto it = canonicals_.find(id);
  if (it == canonicals_.end()) config_fail(key, "unknown approximation " + id);
  return it->second;
}

const MonotoneMachine* Scenario::find_machine(const std::string& id) const {
  auto it = machines_.find(id);
  return it == machines_.end() ? nullptr : &it->second;
}

std::vector<const MonotoneMachine*> Scenario::machine_refs(
    const std::vector<std::string>& ids, const std::string& key) const {
  std::vector<const MonotoneMachine*> out;
  for (const std::string& id : ids) {
    const MonotoneMachine* m = find_machine(id);
    if (m == nullptr) config_fail(key, "unknown machine " + id);
    out.push_back(m);
  }
  return out;
}

void Scenario::register_machine(const std::string& id, MonotoneMachine machine,
                                MachineMeta meta) {
  machine.set_id(id);
  machines_.insert_or_assign(id, std::move(machine));
  machine_meta_.insert_or_assign(id, std::move(meta));
}

void Scenario::run_directive(const DirectiveData& raw) {
  DirectiveData d = raw;
  if (d.stages < 1) d.stages = horizon_;
  const std::string key = "constructions." + d.id;
  if (d.kind == "canonical") {
    auto oit = operators_.find(d.operator_id);
    if (oit == operators_.end()) config_fail(key, "unknown operator " + d.operator_id);
    auto hit = halting_sets_.find(d.halting_set_id);
    if (hit == halting_sets_.end()) config_fail(key, "unknown halting set " + d.halting_set_id);
    canonicals_.emplace(d.id, build_canonical(oit->second, hit->second));
  } else if (d.kind == "empty_approximation") {
    CanonicalApproximation ca;
    ca.stages.resize(static_cast<std::size_t>(std::max(d.stages, 1)) + 1);
    canonicals_.emplace(d.id, std::move(ca));
  } else if (d.kind == "weight_real") {
    derived_reals_.emplace(d.id, weight_real(approx_ref(d.approximation_id, key)));
  } else if (d.kind == "padding_machine") {
    register_machine(d.id,
                     build_padding_machine(approx_ref(d.approximation_id, key),
                                           d.stages, d.id),
                     {"padding_machine", d.approximation_id, "", "", 0, {}});
  } else if (d.kind == "totality_machine") {
    register_machine(d.id,
                     build_totality_machine(approx_ref(d.approximation_id, key),
                                            d.stages, d.id),
                     {"totality_machine", d.approximation_id, "", "", 0, {}});
  } else if (d.kind == "empty_machine") {
    MonotoneMachine m = MonotoneMachine::everywhere_empty(d.id);
    m.extend_horizon(d.stages);
    register_machine(d.id, std::move(m), {"empty_machine", "", "", "", 0, {}});
  } else if (d.kind == "cone_restrict") {
    const MonotoneMachine* m = find_machine(d.machine_id);
    if (m == nullptr) config_fail(key, "unknown machine " + d.machine_id);
    register_machine(d.id, cone_restrict(*m, d.reserved, d.id),
                     {"cone_restrict", "", "", "", 0, {}});
  } else if (d.kind == "splice") {
    const MonotoneMachine* inner = find_machine(d.inner_id);
    const MonotoneMachine* outer = find_machine(d.outer_id);
    if (inner == nullptr) config_fail(key, "unknown machine " + d.inner_id);
    if (outer == nullptr) config_fail(key, "unknown machine " + d.outer_id);
    register_machine(d.id, splice(d.exponent, *inner, *outer, d.id),
                     {"splice", "", d.inner_id, d.outer_id, d.exponent, {}});
  } else if (d.kind == "universal") {
    register_machine(d.id,
                     build_universal(machine_refs(d.machine_ids, key), d.id),
                     {"universal", "", "", "", 0, d.machine_ids});
  } else if (d.kind == "allocation") {
    AllocationMeta meta{d.reserved, d.targets, kc_allocate({d.reserved, d.targets})};
    allocations_.emplace(d.id, std::move(meta));
  } else if (d.kind == "cor34" || d.kind == "cor36") {
    TargetedMachine tm = d.kind == "cor34"
                             ? make_machine_cor34(d.reserved, d.targets, d.id)
                             : make_machine_cor36(d.reserved, d.targets, d.id);
    allocations_.emplace(
        d.id, AllocationMeta{d.reserved,
                             d.kind == "cor34" ? d.targets : std::vector<Dyadic>{},
                             tm.allocation});
    if (d.kind == "cor36") {
      // Allocation targets were solved from the requested TOTAL measures.
      auto& meta = allocations_.at(d.id);
      Dyadic capacity = Dyadic(1) - Dyadic::pow2_neg(d.reserved.length());
      for (const Dyadic& beta : d.targets) meta.targets.push_back(capacity - beta);
    }
    targeted_.emplace(d.id, TargetedMeta{tm.aligned_targets, d.targets, d.kind});
    register_machine(d.id, std::move(tm.machine),
                     {d.kind, "", "", "", 0, {}});
  } else if (d.kind == "universal_leftce" || d.kind == "universal_dce") {
    std::vector<MonotoneMachine> default_base;
    std::vector<const MonotoneMachine*> base;
    int trace_horizon =
        d.kind == "universal_leftce"
            ? real_ref(d.trace_id, key).horizon()
            : real_ref(d.left_id, key).horizon();
    if (d.machine_ids.empty()) {
      default_base = default_base_machines(std::max(trace_horizon, 1));
      for (const MonotoneMachine& m : default_base) base.push_back(&m);
    } else {
      base = machine_refs(d.machine_ids, key);
    }
    Orchestration orch =
        d.kind == "universal_leftce"
            ? make_universal_leftce(real_ref(d.trace_id, key), base, d.id)
            : make_universal_dce(real_ref(d.left_id, key),
                                 real_ref(d.right_id, key),
                                 d.case_tag == "right_ce" ? CaseTag::RightCE
                                 : d.case_tag == "not_random"
                                     ? CaseTag::NotRandom
                                     : CaseTag::LeftCE,
                                 base, d.id);
    const std::string inner_id = d.id + "-base";
    const std::string outer_id = d.id + "-outer";
    register_machine(inner_id, std::move(orch.inner),
                     {"universal", "", "", "", 0, {}});
    allocations_.emplace(outer_id,
                         AllocationMeta{orch.outer.reserved, {},
                                        orch.outer.allocation});
    targeted_.emplace(outer_id,
                      TargetedMeta{orch.outer.aligned_targets, {},
                                   orch.trace_class == "TOTAL" ? "cor36" : "cor34"});
    register_machine(outer_id, std::move(orch.outer.machine),
                     {orch.trace_class == "TOTAL" ? "cor36" : "cor34",
                      "", "", "", 0, {}});
    register_machine(d.id, std::move(orch.spliced),
                     {d.kind, "", inner_id, outer_id, orch.exponent, {}});
    orchestrations_.emplace(
        d.id, OrchMeta{orch.trace_class, orch.requested, orch.inner_trace,
                       orch.exponent, orch.maturity_stage, d.case_tag});
  } else if (d.kind == "rewrite_difference") {
    auto [qb, qa] = rewrite_right_difference(real_ref(d.left_id, key),
                                             real_ref(d.right_id, key), d.q);
    rewrites_.emplace(d.id, RewriteMeta{d.left_id, d.right_id, d.q, qb, qa});
    derived_reals_.emplace(d.id + "-qb", std::move(qb));
    derived_reals_.emplace(d.id + "-qa", std::move(qa));
  } else if (d.kind == "ks_search") {
    int e = ks_exponent_search(real_ref(d.left_id, key),
                               real_ref(d.right_id, key));
    ks_results_.emplace(d.id, KsMeta{d.left_id, d.right_id, e});
  } else if (d.kind == "shift_common") {
    auto [as, bs] = shift_by_common(real_ref(d.left_id, key),
                                    real_ref(d.right_id, key),
                                    real_ref(d.trace_id, key));
    shifts_.emplace(d.id, ShiftMeta{d.left_id, d.right_id, d.trace_id, as, bs});
    derived_reals_.emplace(d.id + "-a", std::move(as));
    derived_reals_.emplace(d.id + "-b", std::move(bs));
  } else {
    config_fail(key, "unknown kind " + d.kind);
  }
}

void Scenario::apply_fault_injection() {
  if (!fault_) return;
  auto it = machines_.find(fault_->machine_id);
  if (it == machines_.end()) {
    config_fail("fault_injection.machine", "unknown machine " + fault_->machine_id);
  }
  MonotoneMachine& m = it->second;
  bool applied = false;
  if (fault_->action == "drop") {
    applied = m.erase_entry(fault_->input);
  } else if (fault_->action == "flip_rule") {
    const MachineEntry* e = m.entry(fault_->input);
    if (e != nullptr) {
      Rule flipped = e->provenance.rule == Rule::Copy ? Rule::Padding : Rule::Copy;
      applied = m.force_rule(fault_->input, flipped);
    }
  } else if (fault_->action == "truncate_output") {
    const MachineEntry* e = m.entry(fault_->input);
    if (e != nullptr && !e->output.empty()) {
      applied = m.force_output(fault_->input,
                               e->output.prefix(e->output.length() - 1));
    }
  }
  if (!applied) {
    config_fail("fault_injection.input",
                "no entry " + fault_->input.str() + " to tamper with");
  }
}

void Scenario::build() {
  if (built_) return;
  for (const DirectiveData& d : directives_) run_directive(d);
  apply_fault_injection();
  built_ = true;
}

std::vector<std::string> Scenario::write_outputs(const std::string& out_dir,
                                                 bool with_traces) {
  if (!built_) build();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  auto open = [&](const std::string& file) {
    std::ofstream out(fs::path(out_dir) / file, std::ios::binary);
    if (!out) throw IoErrorError("cannot write " + file + " in " + out_dir);
    written.push_back(file);
    return out;
  };

  for (const auto& [id, machine] : machines_) {
    auto out = open(id + ".machine.csv");
    machine.write_csv(out);
  }
  for (const auto& [id, meta] : allocations_) {
    if (!meta.stages.empty()) {
      auto out = open(id + ".set.txt");
      write_set_txt(out, meta.stages.back());
    }
  }
  for (const auto& [id, ca] : canonicals_) {
    auto out = open(id + ".limit.set.txt");
    write_set_txt(out, ca.limit_set);
  }

  if (with_traces) {
    std::vector<TraceDirective> traces = traces_;
    if (!traces_explicit_) {
      for (const auto& [id, machine] : machines_) {
        traces.push_back({id, "", ClassSpec::total()});
        traces.push_back({id, "", ClassSpec::ends_in_zeros()});
      }
    }
    for (const TraceDirective& td : traces) {
      if (!td.real_id.empty()) {
        auto out = open(td.real_id + ".real.csv");
        write_real_csv(out, real_ref(td.real_id, "traces.real"));
        continue;
      }
      const MonotoneMachine* m = find_machine(td.machine_id);
      if (m == nullptr) {
        config_fail("traces.machine", "unknown machine " + td.machine_id);
      }
      StageMeasureTrace trace =
          compute_trace(*m, td.class_spec, m->horizon());
      // Attach aligned/requested targets where the construction pinned them.
      auto tit = targeted_.find(td.machine_id);
      if (tit != targeted_.end()) {
        bool matches = (tit->second.kind == "cor34" &&
                        td.class_spec.kind == ClassSpec::Kind::EndsInZeros) ||
                       (tit->second.kind == "cor36" &&
                        td.class_spec.kind == ClassSpec::Kind::Total);
        if (matches) {
          for (const Dyadic& t : tit->second.aligned) trace.targets.emplace_back(t);
        }
      }
      auto oit = orchestrations_.find(td.machine_id);
      if (oit != orchestrations_.end() &&
          td.class_spec.name() == oit->second.trace_class) {
        for (const Dyadic& t : oit->second.requested) trace.targets.emplace_back(t);
      }
      auto out = open(td.machine_id + ".trace." +
                      sanitize(td.class_spec.name()) + ".csv");
      trace.write_csv(out);
    }
    for (const auto& [id, meta] : rewrites_) {
      {
        auto out = open(id + "-qb.real.csv");
        write_real_csv(out, meta.q_minus_b);
      }
      {
        auto out = open(id + "-qa.real.csv");
        write_real_csv(out, meta.q_minus_a);
      }
    }
    for (const auto& [id, meta] : shifts_) {
      {
        auto out = open(id + "-a.real.csv");
        write_real_csv(out, meta.a_shifted);
      }
      {
        auto out = open(id + "-b.real.csv");
        write_real_csv(out, meta.b_shifted);
      }
    }
    for (const auto& [id, meta] : ks_results_) {
      auto out = open(id + ".ks.csv");
      out << "exponent\n" << meta.exponent << '\n';
    }
    for (const auto& [id, r] : derived_reals_) {
      auto out = open(id + ".real.csv");
      write_real_csv(out, r);
    }
  }
  std::sort(written.begin(), written.end());
  return written;
}

VerifyReport Scenario::verify() {
  if (!built_) build();
  VerifyReport report;
  auto ok = [&report](const std::string& suite, const std::string& what) {
    report.lines.push_back("OK        " + suite + ": " + what);
  };
  auto violation = [&report](const std::string& suite, const std::string& what) {
    report.lines.push_back("VIOLATION " + suite + ": " + what);
    ++report.violations;
  };

  bool anything = false;

  // Prefix-freeness and cached weights.
  {
    int checked = 0;
    auto audit_set = [&](const PrefixFreeSet& s, const std::string& what) {
      ++checked;
      if (s.recompute_weight() != s.weight()) {
        violation("prefix-free-weights", what + ": cached weight drifts");
      }
    };
    for (const auto& [id, ca] : canonicals_) {
      for (int s = 0; s <= ca.horizon(); ++s) {
        audit_set(ca.at(s), id + " stage " + std::to_string(s));
      }
      audit_set(ca.limit_set, id + " limit");
    }
    for (const auto& [id, meta] : allocations_) {
      for (std::size_t t = 0; t < meta.stages.size(); ++t) {
        audit_set(meta.stages[t], id + " allocation stage " + std::to_string(t));
      }
    }
    if (checked > 0) {
      anything = true;
      ok("prefix-free-weights", std::to_string(checked) + " sets audited");
    }
  }

  // Canonical-approximation laws.
  for (const auto& [id, ca] : canonicals_) {
    anything = true;
    auto errs = check_canonical_laws(ca);
    for (const std::string& e : errs) violation("canonical-laws", id + ": " + e);
    if (errs.empty()) ok("canonical-laws", id);
  }

  // Machine monotonicity (and padding length/totality laws).
  for (const auto& [id, m] : machines_) {
    anything = true;
    auto errs = m.check_monotonicity();
    for (const std::string& e : errs) violation("monotonicity", id + ": " + e);
    if (errs.empty()) ok("monotonicity", id);
    const MachineMeta& meta = machine_meta_.at(id);
    if (meta.kind == "padding_machine" || meta.kind == "cor34") {
      int bad = 0;
      for (const auto& [input, e] : m.table()) {
        if (input.length() != e.output.length()) ++bad;
      }
      if (bad > 0) {
        violation("padding-length", id + ": " + std::to_string(bad) +
                                        " entries with |M(sigma)| != |sigma|");
      } else {
        ok("padding-length", id);
      }
    }
    if (meta.kind == "padding_machine") {
      // Totality on blocks: every block string is defined.
      bool all_defined = true;
      for (int s = 0; s < m.horizon(); ++s) {
        std::size_t len = (std::size_t{1} << (s + 1)) - 1;
        if (len > 15) break;
        for (const BitString& x : all_strings_of_length(len)) {
          if (m.entry(x) == nullptr) {
            all_defined = false;
            break;
          }
        }
      }
      if (all_defined) {
        ok("block-totality", id);
      } else {
        violation("block-totality", id + ": undefined block string");
      }
      // Padded mode exactly on the covered part of the consulted stage set.
      auto ca_it = canonicals_.find(meta.approximation_id);
      if (ca_it != canonicals_.end()) {
        int bad = 0;
        for (const auto& [input, e] : m.table()) {
          if (input.empty()) continue;
          bool covered =
              ca_it->second.at(e.stage - 1).contains_prefix_of(input);
          if ((e.provenance.rule == Rule::Padding) != covered) ++bad;
        }
        if (bad == 0) {
          ok("padded-mode", id);
        } else {
          violation("padded-mode",
                    id + ": " + std::to_string(bad) +
                        " entries whose mode disagrees with the stage set");
        }
      }
    }
  }

  // Allocation exactness.
  for (const auto& [id, meta] : allocations_) {
    anything = true;
    bool good = true;
    for (std::size_t t = 0; t < meta.stages.size(); ++t) {
      const PrefixFreeSet& s = meta.stages[t];
      if (t < meta.targets.size() && s.weight() != meta.targets[t]) {
        violation("allocation", id + ": stage " + std::to_string(t) +
                                    " weight " + s.weight().to_string() +
                                    " != target " + meta.targets[t].to_string());
        good = false;
      }
      for (const BitString& member : s.members()) {
        if (member.compatible_with(meta.reserved)) {
          violation("allocation", id + ": member " + member.str() +
                                      " compatible with the reserved string");
          good = false;
        }
      }
      if (t > 0 && !meta.stages[t - 1].is_subset_of(s)) {
        violation("allocation", id + ": stage " + std::to_string(t - 1) +
                                    " not contained in stage " + std::to_string(t));
        good = false;
      }
    }
    if (good) ok("allocation", id);
  }

  // Measured traces against aligned targets.
  for (const auto& [id, meta] : targeted_) {
    anything = true;
    const MonotoneMachine& m = machines_.at(id);
    ClassSpec cls = meta.kind == "cor34" ? ClassSpec::ends_in_zeros()
                                         : ClassSpec::total();
    bool good = true;
    for (int s = 0; s <= m.horizon() &&
                    s < static_cast<int>(meta.aligned.size());
         ++s) {
      Dyadic measured = stage_measure(m, cls, s);
      if (measured != meta.aligned[static_cast<std::size_t>(s)]) {
        violation("measure-identities",
                  id + ": " + cls.name() + " at stage " + std::to_string(s) +
                      " is " + measured.to_string() + ", aligned target " +
                      meta.aligned[static_cast<std::size_t>(s)].to_string());
        good = false;
      }
    }
    if (good) ok("measure-identities", id);
  }

  // Splice identity.
  for (const auto& [id, meta] : machine_meta_) {
    if (meta.inner_id.empty() || meta.outer_id.empty()) continue;
    anything = true;
    const MonotoneMachine& spliced = machines_.at(id);
    const MonotoneMachine& inner = machines_.at(meta.inner_id);
    const MonotoneMachine& outer = machines_.at(meta.outer_id);
    for (const ClassSpec& cls :
         {ClassSpec::total(), ClassSpec::ends_in_zeros()}) {
      SpliceReport r =
          verify_splice_identity(spliced, inner, outer, meta.exponent, cls);
      for (const SpliceViolation& v : r.violations) {
        violation("splice-identity",
                  id + " " + cls.name() + " stage " + std::to_string(v.stage) +
                      ": " + v.spliced_measure.to_string() +
                      " != " + v.recombined.to_string());
      }
      if (r.ok()) ok("splice-identity", id + " " + cls.name());
    }
  }

  // Universality: the coded cones track the listed machines stage for stage.
  for (const auto& [id, meta] : machine_meta_) {
    if (meta.kind != "universal" || meta.listed_ids.empty()) continue;
    anything = true;
    const MonotoneMachine& u = machines_.at(id);
    bool good = true;
    for (std::size_t e = 0; e < meta.listed_ids.size(); ++e) {
      const MonotoneMachine& m = machines_.at(meta.listed_ids[e]);
      BitString prefix = BitString::zeros(e).with_bit(true);
      for (const auto& [input, entry] : m.table()) {
        const MachineEntry* ue = u.entry(prefix.concat(input));
        if (ue == nullptr || ue->output != entry.output ||
            ue->stage != entry.stage) {
          violation("universality",
                    id + ": coded entry for " + meta.listed_ids[e] + " at " +
                        input.str() + " does not track the machine");
          good = false;
        }
      }
    }
    if (good) ok("universality", id);
  }

  // Orchestration reconstruction identities.
  for (const auto& [id, meta] : orchestrations_) {
    anything = true;
    const MonotoneMachine& spliced = machines_.at(id);
    ClassSpec cls = meta.trace_class == "TOTAL" ? ClassSpec::total()
                                                : ClassSpec::ends_in_zeros();
    bool good = true;
    for (std::size_t s = 0; s < meta.requested.size(); ++s) {
      Dyadic delta = meta.inner_trace[s].scaled_down(
          static_cast<unsigned long>(meta.exponent));
      Dyadic reconstructed = (meta.requested[s] - delta) + delta;
      if (reconstructed != meta.requested[s]) {
        violation("reconstruction", id + ": arithmetic identity fails at stage " +
                                        std::to_string(s));
        good = false;
      }
    }
    for (int s = meta.maturity;
         s < static_cast<int>(meta.requested.size()); ++s) {
      Dyadic measured = stage_measure(spliced, cls, s);
      if (measured != meta.requested[static_cast<std::size_t>(s)]) {
        violation("reconstruction",
                  id + ": measured " + cls.name() + " " + measured.to_string() +
                      " != requested " +
                      meta.requested[static_cast<std::size_t>(s)].to_string() +
                      " at stage " + std::to_string(s));
        good = false;
      }
    }
    if (good) ok("reconstruction", id);
  }

  // ML-test bound.
  for (std::size_t i = 0; i < phi_order_.size(); ++i) {
    anything = true;
    const PhiTable& phi = phis_.at(phi_order_[i]);
    bool good = true;
    for (int s = 0; s <= 6; ++s) {
      Dyadic w = ml_test_weight(static_cast<int>(i), s, phi);
      if (w > Dyadic::pow2_neg(static_cast<unsigned long>(s))) {
        violation("ml-test-bound", phi_order_[i] + ": weight " + w.to_string() +
                                       " exceeds 2^-" + std::to_string(s));
        good = false;
      }
      if (s <= 3) {
        PrefixFreeSet member = ml_test_member(static_cast<int>(i), s, phi);
        if (set_measure(member) != w) {
          violation("ml-test-bound",
                    phi_order_[i] + ": materialized weight differs at stage " +
                        std::to_string(s));
          good = false;
        }
      }
    }
    if (good) ok("ml-test-bound", phi_order_[i]);
  }

  // Real-approximation identities.
  for (const auto& [id, meta] : rewrites_) {
    anything = true;
    const MonotoneRealApprox& a = real_ref(meta.a_id, "verify");
    const MonotoneRealApprox& b = real_ref(meta.b_id, "verify");
    bool good = true;
    for (std::size_t s = 0; s < a.values.size(); ++s) {
      Dyadic lhs = meta.q_minus_b.values[s] - meta.q_minus_a.values[s];
      Dyadic rhs = a.values[s] - b.values[s];
      if (lhs != rhs) {
        violation("rewrite-identity", id + ": stage " + std::to_string(s));
        good = false;
      }
    }
    try {
      meta.q_minus_b.validate();
      meta.q_minus_a.validate();
    } catch (const Error& e) {
      violation("rewrite-identity", id + ": " + e.what());
      good = false;
    }
    if (good) ok("rewrite-identity", id);
  }
  for (const auto& [id, meta] : ks_results_) {
    anything = true;
    const MonotoneRealApprox& g = real_ref(meta.g_id, "verify");
    const MonotoneRealApprox& a = real_ref(meta.a_id, "verify");
    bool good = true;
    auto nondecreasing_at = [&](int e) {
      for (std::size_t s = 1; s < g.values.size(); ++s) {
        Dyadic dg = g.values[s] - g.values[s - 1];
        Dyadic da = a.values[s] - a.values[s - 1];
        if (dg < da.scaled_down(static_cast<unsigned long>(e))) return false;
      }
      return true;
    };
    if (!nondecreasing_at(meta.exponent)) {
      violation("exponent-certificate", id + ": certified exponent fails");
      good = false;
    }
    if (meta.exponent > 0 && nondecreasing_at(meta.exponent - 1)) {
      violation("exponent-certificate", id + ": exponent is not minimal");
      good = false;
    }
    if (good) ok("exponent-certificate", id);
  }
  for (const auto& [id, meta] : shifts_) {
    anything = true;
    const MonotoneRealApprox& a = real_ref(meta.a_id, "verify");
    const MonotoneRealApprox& b = real_ref(meta.b_id, "verify");
    bool good = true;
    for (std::size_t s = 0; s < a.values.size(); ++s) {
      if (meta.a_shifted.values[s] - meta.b_shifted.values[s] !=
          a.values[s] - b.values[s]) {
        violation("shift-identity", id + ": stage " + std::to_string(s));
        good = false;
      }
    }
    if (good) ok("shift-identity", id);
  }

  if (!anything) {
    report.vacuous = true;
    report.lines.push_back("WARNING: empty scenario, nothing to verify");
  }
  return report;
}

}  // namespace stagesim
