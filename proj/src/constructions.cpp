#include "stagesim/constructions.hpp"

#include <algorithm>
#include <string>

#include "stagesim/errors.hpp"
#include "stagesim/measure.hpp"

namespace stagesim {

namespace {

constexpr int kMaxPaddingStages = 4;   // block length 2^4 - 1 = 15
constexpr int kMaxTotalityStages = 15;
constexpr int kMaxExponent = 64;

int block_length(int s) { return (1 << (s + 1)) - 1; }

void require_stage_sets(const CanonicalApproximation& q, int stages) {
  if (q.horizon() < stages - 1) {
    throw HorizonExceededError(
        "approximation horizon " + std::to_string(q.horizon()) +
        " too short for " + std::to_string(stages) + " machine stages");
  }
}

}  // namespace

MonotoneMachine build_padding_machine(const CanonicalApproximation& q,
                                      int stages, std::string id) {
  if (stages < 1 || stages > kMaxPaddingStages) {
    throw InvalidArgumentError("padding machine stages must be in [1, " +
                               std::to_string(kMaxPaddingStages) + "]");
  }
  require_stage_sets(q, stages);
  MonotoneMachine m(std::move(id));
  m.define(BitString(), BitString(), 0, Provenance{Rule::Copy, {}});
  for (int s = 0; s < stages; ++s) {
    const PrefixFreeSet& q_s = q.at(s);
    const int parent_len = block_length(s - 1);  // 2^s - 1
    for (const BitString& sigma :
         all_strings_of_length(static_cast<std::size_t>(block_length(s)))) {
      BitString tau = sigma.prefix(static_cast<std::size_t>(parent_len));
      const BitString& parent_value = m.entry(tau)->output;
      if (q_s.contains_prefix_of(sigma)) {
        BitString padded = parent_value.concat(
            BitString::zeros(sigma.length() - parent_value.length()));
        m.define(sigma, padded, s + 1, Provenance{Rule::Padding, {}});
      } else {
        BitString copied = parent_value.concat(
            sigma.suffix_from(parent_value.length()));
        m.define(sigma, copied, s + 1, Provenance{Rule::Copy, {}});
      }
    }
  }
  m.extend_horizon(stages);
  return m;
}

MonotoneMachine build_totality_machine(const CanonicalApproximation& q,
                                       int stages, std::string id) {
  if (stages < 1 || stages > kMaxTotalityStages) {
    throw InvalidArgumentError("totality machine stages must be in [1, " +
                               std::to_string(kMaxTotalityStages) + "]");
  }
  require_stage_sets(q, stages);
  MonotoneMachine m(std::move(id));
  for (int s = 0; s < stages; ++s) {
    const PrefixFreeSet& q_s = q.at(s);
    for (int len = 0; len <= s; ++len) {
      for (const BitString& sigma :
           all_strings_of_length(static_cast<std::size_t>(len))) {
        if (m.entry(sigma) != nullptr) continue;
        if (q_s.contains_prefix_of(sigma)) continue;
        m.define(sigma, BitString::zeros(sigma.length()), s + 1,
                 Provenance{Rule::Zeros, {}});
      }
    }
  }
  m.extend_horizon(stages);
  return m;
}

MonotoneMachine cone_restrict(const MonotoneMachine& m, const BitString& rho,
                              std::string id) {
  MonotoneMachine out(id.empty() ? m.id() + "-cone" : std::move(id));
  for (const auto& [input, e] : m.table()) {
    if (!input.compatible_with(rho)) {
      out.define(input, e.output, e.stage, e.provenance);
    }
  }
  for (const BitString& cone : m.empty_cones()) {
    if (!cone.compatible_with(rho)) {
      out.add_empty_cone(cone);
    } else if (cone.length() < rho.length() && cone.is_prefix_of(rho)) {
      // Keep the part of the old cone branching off rho.
      for (std::size_t j = cone.length(); j < rho.length(); ++j) {
        out.add_empty_cone(rho.prefix(j).with_bit(!rho.bit(j)));
      }
    }
    // Cones extending rho are absorbed by the rho cone.
  }
  out.add_empty_cone(rho);
  out.extend_horizon(m.horizon());
  return out;
}

MonotoneMachine splice(int e, const MonotoneMachine& inner,
                       const MonotoneMachine& outer, std::string id) {
  if (e < 1) throw InvalidArgumentError("splice exponent must be >= 1");
  const BitString cone = BitString::zeros(static_cast<std::size_t>(e));
  bool covered = false;
  for (const BitString& c : outer.empty_cones()) {
    if (c.is_prefix_of(cone)) covered = true;
  }
  if (!covered) {
    throw ConeNotEmptyError("outer machine " + outer.id() +
                            " does not map the 0^" + std::to_string(e) +
                            " cone to the empty string");
  }
  MonotoneMachine out(std::move(id));
  for (const auto& [input, entry] : outer.table()) {
    if (input.compatible_with(cone)) continue;  // cannot occur: under a cone
    out.define(input, entry.output, entry.stage, entry.provenance);
  }
  for (const auto& [input, entry] : inner.table()) {
    Provenance p = entry.provenance;
    p.chain.insert(p.chain.begin(), SpliceStep{inner.id(), cone});
    out.define(cone.concat(input), entry.output, entry.stage, std::move(p));
  }
  for (const BitString& c : outer.empty_cones()) {
    if (!c.compatible_with(cone)) {
      out.add_empty_cone(c);
    } else if (c.length() < cone.length()) {
      for (std::size_t j = c.length(); j < cone.length(); ++j) {
        out.add_empty_cone(cone.prefix(j).with_bit(true));
      }
    }
  }
  for (const BitString& c : inner.empty_cones()) {
    out.add_empty_cone(cone.concat(c));
  }
  out.extend_horizon(std::max(inner.horizon(), outer.horizon()));
  return out;
}

MonotoneMachine build_universal(
    const std::vector<const MonotoneMachine*>& machines, std::string id) {
  MonotoneMachine out(std::move(id));
  for (std::size_t e = 0; e < machines.size(); ++e) {
    const MonotoneMachine& m = *machines[e];
    const BitString prefix = BitString::zeros(e).with_bit(true);  // 0^e 1
    for (const auto& [input, entry] : m.table()) {
      Provenance p = entry.provenance;
      p.chain.insert(p.chain.begin(), SpliceStep{m.id(), prefix});
      out.define(prefix.concat(input), entry.output, entry.stage,
                 std::move(p));
    }
    for (const BitString& c : m.empty_cones()) {
      out.add_empty_cone(prefix.concat(c));
    }
    out.extend_horizon(m.horizon());
  }
  out.add_empty_cone(BitString::zeros(machines.size()));
  return out;
}

std::string case_tag_name(CaseTag tag) {
  switch (tag) {
    case CaseTag::LeftCE:
      return "left_ce";
    case CaseTag::RightCE:
      return "right_ce";
    case CaseTag::NotRandom:
      return "not_random";
  }
  return "?";
}

namespace {

// Weight of the members of `set` with length at most max_len.
Dyadic weight_up_to(const PrefixFreeSet& set, int max_len) {
  Dyadic w;
  for (const BitString& m : set.members()) {
    if (static_cast<int>(m.length()) <= max_len) {
      w += Dyadic::pow2_neg(m.length());
    }
  }
  return w;
}

// Canonical wrapper of an allocation: Q_0 empty, Q_t = S_t, padded with
// the final set up to `horizon`.
CanonicalApproximation wrap_allocation(const std::vector<PrefixFreeSet>& alloc,
                                       int horizon) {
  CanonicalApproximation ca;
  ca.stages.resize(static_cast<std::size_t>(horizon) + 1);
  for (int t = 1; t <= horizon; ++t) {
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(t),
                                          alloc.size());
    if (i >= 1) ca.stages[static_cast<std::size_t>(t)] = alloc[i - 1];
  }
  for (int t = 1; t <= horizon; ++t) ca.true_stages.insert(t);
  if (!alloc.empty()) ca.limit_set = alloc.back();
  return ca;
}

}  // namespace

TargetedMachine make_machine_cor34(const BitString& rho,
                                   const std::vector<Dyadic>& targets,
                                   std::string id) {
  const int stages = static_cast<int>(targets.size()) + 1;
  if (stages > kMaxPaddingStages) {
    throw InvalidArgumentError("cor34 supports at most " +
                               std::to_string(kMaxPaddingStages - 1) +
                               " targets at desk scale");
  }
  TargetedMachine out{MonotoneMachine("tmp"), {}, {}, rho};
  out.allocation = kc_allocate({rho, targets});
  CanonicalApproximation ca = wrap_allocation(out.allocation, stages - 1);
  MonotoneMachine padded = build_padding_machine(ca, stages, id + "-pad");
  out.machine = cone_restrict(padded, rho, std::move(id));
  // ENDS_IN_ZEROS at machine stage s reads Q_{s-1} over the 2^s - 1 block.
  out.aligned_targets.assign(static_cast<std::size_t>(stages) + 1, Dyadic());
  for (int s = 1; s <= stages; ++s) {
    out.aligned_targets[static_cast<std::size_t>(s)] =
        weight_up_to(ca.at(s - 1), block_length(s - 1));
  }
  return out;
}

TargetedMachine make_machine_cor36(const BitString& rho,
                                   const std::vector<Dyadic>& targets,
                                   std::string id) {
  const std::size_t e = rho.length();
  const Dyadic capacity = Dyadic(1) - Dyadic::pow2_neg(e);
  std::vector<Dyadic> allocation_targets;
  allocation_targets.reserve(targets.size());
  for (const Dyadic& beta : targets) {
    if (!(beta > Dyadic()) || beta > capacity) {
      throw TargetOutOfRangeError("requested TOTAL measure " +
                                  beta.to_string() + " outside (0, " +
                                  capacity.to_string() + "]");
    }
    allocation_targets.push_back(capacity - beta);
  }
  const int stages = static_cast<int>(targets.size()) + 1;
  if (stages > kMaxTotalityStages) {
    throw InvalidArgumentError("cor36 supports at most " +
                               std::to_string(kMaxTotalityStages - 1) +
                               " targets at desk scale");
  }
  TargetedMachine out{MonotoneMachine("tmp"), {}, {}, rho};
  out.allocation = kc_allocate({rho, allocation_targets});
  CanonicalApproximation ca = wrap_allocation(out.allocation, stages - 1);
  MonotoneMachine total = build_totality_machine(ca, stages, id + "-tot");
  out.machine = cone_restrict(total, rho, std::move(id));
  // TOTAL at machine stage s probes length s-1: the rho cone shadows the
  // frontier until it is deeper than rho, and allocation pieces count once
  // their length fits.
  out.aligned_targets.assign(static_cast<std::size_t>(stages) + 1, Dyadic());
  for (int s = 1; s <= stages; ++s) {
    unsigned long shadow =
        std::min<unsigned long>(static_cast<unsigned long>(s - 1), e);
    out.aligned_targets[static_cast<std::size_t>(s)] =
        (Dyadic(1) - Dyadic::pow2_neg(shadow)) -
        weight_up_to(ca.at(s - 1), s - 1);
  }
  return out;
}

namespace {

MonotoneRealApprox to_increasing(std::vector<Dyadic> values) {
  MonotoneRealApprox r;
  r.direction = Direction::Increasing;
  r.values = std::move(values);
  return r;
}

std::vector<Dyadic> machine_trace(const MonotoneMachine& m, const ClassSpec& c,
                                  int horizon) {
  std::vector<Dyadic> out;
  out.reserve(static_cast<std::size_t>(horizon) + 1);
  for (int s = 0; s <= horizon; ++s) out.push_back(stage_measure(m, c, s));
  return out;
}

}  // namespace

Orchestration make_universal_leftce(
    const MonotoneRealApprox& g,
    const std::vector<const MonotoneMachine*>& base_machines,
    std::string id) {
  if (g.direction != Direction::Increasing) {
    throw InvalidArgumentError("leftce construction requires an increasing trace");
  }
  g.validate();
  const int horizon = g.horizon();
  if (horizon < 1) throw InvalidArgumentError("trace horizon must be >= 1");
  for (const Dyadic& v : g.values) {
    if (v.is_negative() || v >= Dyadic(1)) {
      throw TargetOutOfRangeError("trace value " + v.to_string() +
                                  " outside [0, 1)");
    }
  }
  if (!(g.values.back() > Dyadic())) {
    throw TargetOutOfRangeError("trace must end above 0");
  }

  MonotoneMachine base = build_universal(base_machines, id + "-base");
  if (base.horizon() < horizon) {
    throw HorizonExceededError("base universal horizon " +
                               std::to_string(base.horizon()) +
                               " shorter than the trace");
  }
  std::vector<Dyadic> p0 =
      machine_trace(base, ClassSpec::ends_in_zeros(), horizon);

  int e = std::max(1, ks_exponent_search(g, to_increasing(p0), kMaxExponent));
  auto outer_targets_for = [&](int exp) {
    std::vector<Dyadic> tau(g.values.size());
    for (std::size_t s = 0; s < g.values.size(); ++s) {
      tau[s] = g.values[s] -
               p0[s].scaled_down(static_cast<unsigned long>(exp));
    }
    return tau;
  };
  auto in_window = [&](const std::vector<Dyadic>& tau, int exp) {
    Dyadic cap = Dyadic(1) - Dyadic::pow2_neg(static_cast<unsigned long>(exp));
    for (const Dyadic& t : tau) {
      if (t.is_negative() || t >= cap) return false;
    }
    return true;
  };
  std::vector<Dyadic> tau = outer_targets_for(e);
  while (e <= kMaxExponent && !in_window(tau, e)) {
    ++e;
    tau = outer_targets_for(e);
  }
  if (e > kMaxExponent) {
    throw NoExponentError("no exponent keeps the outer targets within the cone capacity");
  }
  if (!tau[0].is_zero() ||
      (g.values.size() > 1 && !tau[1].is_zero())) {
    throw TargetOutOfRangeError(
        "outer targets must start at 0 for the first two stages (nothing is "
        "allocatable before the first block)");
  }

  const BitString rho = BitString::zeros(static_cast<std::size_t>(e));
  std::vector<Dyadic> cor_targets(tau.begin() + 2, tau.end());
  TargetedMachine outer = make_machine_cor34(rho, cor_targets, id + "-outer");
  for (int s = 0; s <= horizon; ++s) {
    if (outer.aligned_targets[static_cast<std::size_t>(s)] !=
        tau[static_cast<std::size_t>(s)]) {
      throw TargetOutOfRangeError(
          "outer target " + tau[static_cast<std::size_t>(s)].to_string() +
          " at stage " + std::to_string(s) +
          " is not realizable on the block schedule");
    }
  }

  Orchestration orch{splice(e, base, outer.machine, id), std::move(base),
                     std::move(outer), e, "ENDS_IN_ZEROS", g.values,
                     std::move(p0), 0};
  // End-to-end contract: the measured trace reproduces g bit for bit.
  for (int s = 0; s <= horizon; ++s) {
    Dyadic measured =
        stage_measure(orch.spliced, ClassSpec::ends_in_zeros(), s);
    if (measured != g.values[static_cast<std::size_t>(s)]) {
      throw TargetOutOfRangeError(
          "spliced trace " + measured.to_string() + " differs from " +
          g.values[static_cast<std::size_t>(s)].to_string() + " at stage " +
          std::to_string(s));
    }
  }
  return orch;
}

Orchestration make_universal_dce(
    const MonotoneRealApprox& a, const MonotoneRealApprox& b, CaseTag tag,
    const std::vector<const MonotoneMachine*>& base_machines,
    std::string id) {
  DCERealApprox d = DCERealApprox::make(a, b);
  // The interval requirement is about the limit; stage 0 may sit at 0
  // (no construction can place padded mass before the first block).
  for (std::size_t s = 0; s < d.values.size(); ++s) {
    if (d.values[s].is_negative() || !(d.values[s] < Dyadic(1))) {
      throw TargetOutOfRangeError("difference trace value " +
                                  d.values[s].to_string() +
                                  " outside [0, 1)");
    }
  }
  if (!(d.values.back() > Dyadic())) {
    throw TargetOutOfRangeError("difference trace must end above 0");
  }
  const int horizon = static_cast<int>(d.values.size()) - 1;

  if (tag == CaseTag::LeftCE) {
    for (std::size_t s = 1; s < d.values.size(); ++s) {
      if (d.values[s] < d.values[s - 1]) {
        throw NonMonotoneOuterError(
            "left_ce tag inconsistent: the difference trace decreases at stage " +
            std::to_string(s));
      }
    }
    MonotoneRealApprox diff = to_increasing(d.values);
    Orchestration orch = make_universal_leftce(diff, base_machines, id);
    orch.requested = d.values;
    return orch;
  }

  MonotoneMachine base = build_universal(base_machines, id + "-base");
  if (base.horizon() < horizon) {
    throw HorizonExceededError("base universal horizon " +
                               std::to_string(base.horizon()) +
                               " shorter than the trace");
  }
  std::vector<Dyadic> delta = machine_trace(base, ClassSpec::total(), horizon);

  bool monotone_seen = false;
  for (int e = 1; e <= kMaxExponent; ++e) {
    std::vector<Dyadic> tau(d.values.size());
    for (std::size_t s = 0; s < d.values.size(); ++s) {
      tau[s] =
          d.values[s] - delta[s].scaled_down(static_cast<unsigned long>(e));
    }
    bool nonincreasing = true;
    for (std::size_t s = 1; s < tau.size(); ++s) {
      if (tau[s] > tau[s - 1]) {
        nonincreasing = false;
        break;
      }
    }
    if (!nonincreasing) continue;
    monotone_seen = true;
    const Dyadic capacity =
        Dyadic(1) - Dyadic::pow2_neg(static_cast<unsigned long>(e));
    bool in_window = true;
    for (std::size_t s = 2; s < tau.size(); ++s) {
      if (!(tau[s] > Dyadic()) || tau[s] > capacity) {
        in_window = false;
        break;
      }
    }
    if (!in_window) continue;

    const BitString rho = BitString::zeros(static_cast<std::size_t>(e));
    std::vector<Dyadic> cor_targets(tau.begin() + 2, tau.end());
    TargetedMachine outer =
        make_machine_cor36(rho, cor_targets, id + "-outer");
    Orchestration orch{splice(e, base, outer.machine, id), std::move(base),
                       std::move(outer), e, "TOTAL", d.values,
                       std::move(delta), 0};
    // Maturity: first stage from which the measured trace equals d.
    int maturity = -1;
    for (int s = horizon; s >= 0; --s) {
      Dyadic measured = stage_measure(orch.spliced, ClassSpec::total(), s);
      if (measured == d.values[static_cast<std::size_t>(s)]) {
        maturity = s;
      } else {
        break;
      }
    }
    if (maturity < 0) {
      throw TargetOutOfRangeError(
          "spliced TOTAL trace never reaches the requested difference");
    }
    orch.maturity_stage = maturity;
    return orch;
  }
  if (monotone_seen) {
    throw TargetOutOfRangeError(
        "no exponent keeps the outer targets within the cone capacity");
  }
  throw NonMonotoneOuterError(
      "declared case tag requires a nonincreasing outer target trace");
}

std::vector<MonotoneMachine> default_base_machines(int stages) {
  // A padding machine that pads everywhere from stage 2 on (the root is in
  // every Q_s with s >= 1), and a totality machine over the empty set.
  CanonicalApproximation root_cover;
  root_cover.stages.resize(static_cast<std::size_t>(stages));
  for (int s = 1; s < stages; ++s) {
    root_cover.stages[static_cast<std::size_t>(s)].insert(BitString());
  }
  for (int s = 1; s < stages; ++s) root_cover.true_stages.insert(s);
  root_cover.limit_set.insert(BitString());

  CanonicalApproximation empty;
  empty.stages.resize(static_cast<std::size_t>(stages));

  std::vector<MonotoneMachine> out;
  out.push_back(build_padding_machine(root_cover,
                                      std::min(stages, kMaxPaddingStages),
                                      "base-pad"));
  out.push_back(build_totality_machine(empty, stages, "base-tot"));
  for (MonotoneMachine& m : out) m.extend_horizon(stages);
  return out;
}

}  // namespace stagesim
