#include "stagesim/approximation.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "stagesim/errors.hpp"

namespace stagesim {

std::set<int> MockHaltingSet::enumerated_up_to(int s) const {
  std::set<int> out;
  for (const Event& e : events) {
    if (e.stage <= s) out.insert(e.number);
  }
  return out;
}

std::set<int> MockHaltingSet::final_set() const {
  return enumerated_up_to(horizon);
}

void MockHaltingSet::validate() const {
  std::set<int> seen;
  int last_stage = 0;
  for (const Event& e : events) {
    if (e.stage <= last_stage) {
      throw InvalidArgumentError("event stages must be strictly increasing");
    }
    if (e.stage > horizon) {
      throw InvalidArgumentError("event at stage " + std::to_string(e.stage) +
                                 " beyond horizon " + std::to_string(horizon));
    }
    if (e.number < 0) {
      throw InvalidArgumentError("negative number in halting set");
    }
    if (!seen.insert(e.number).second) {
      throw InvalidArgumentError("number " + std::to_string(e.number) +
                                 " enumerated twice");
    }
    last_stage = e.stage;
  }
  if (horizon < 1) {
    throw InvalidArgumentError("halting-set horizon must be >= 1");
  }
}

bool OracleCondition::holds(const std::set<int>& oracle) const {
  for (int n : required_in) {
    if (!oracle.count(n)) return false;
  }
  for (int n : required_out) {
    if (oracle.count(n)) return false;
  }
  return true;
}

int OracleCondition::use() const {
  int top = -1;
  for (int n : required_in) top = std::max(top, n);
  for (int n : required_out) top = std::max(top, n);
  return top + 1;
}

void MockCEOperator::validate() const {
  for (const Axiom& a : axioms) {
    if (a.appearance_stage < 1) {
      throw InvalidArgumentError("axiom appearance stages must be >= 1");
    }
  }
}

const PrefixFreeSet& CanonicalApproximation::at(int s) const {
  if (s < 0 || s >= static_cast<int>(stages.size())) {
    throw HorizonExceededError("stage " + std::to_string(s) +
                               " outside approximation horizon " +
                               std::to_string(horizon()));
  }
  return stages[static_cast<std::size_t>(s)];
}

std::vector<BitString> hat_enumeration(const MockCEOperator& op,
                                       const MockHaltingSet& h, int s) {
  std::vector<BitString> out;
  if (s < 1) return out;
  std::set<int> oracle = h.enumerated_up_to(s);
  std::optional<int> fresh;  // number entering exactly at stage s
  for (const auto& e : h.events) {
    if (e.stage == s) fresh = e.number;
  }
  for (const Axiom& a : op.axioms) {
    if (a.appearance_stage > s) continue;
    if (!a.condition.holds(oracle)) continue;
    if (fresh && a.condition.use() > *fresh) continue;  // withheld this stage
    out.push_back(a.string);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::set<int> true_stages(const MockHaltingSet& h) {
  std::set<int> out;
  for (std::size_t i = 0; i < h.events.size(); ++i) {
    bool falsified = false;
    for (std::size_t j = i + 1; j < h.events.size(); ++j) {
      if (h.events[j].number < h.events[i].number) {
        falsified = true;
        break;
      }
    }
    if (!falsified) out.insert(h.events[i].stage);
  }
  return out;
}

CanonicalApproximation build_canonical(const MockCEOperator& op,
                                       const MockHaltingSet& h) {
  h.validate();
  op.validate();
  CanonicalApproximation ca;
  ca.stages.resize(static_cast<std::size_t>(h.horizon) + 1);
  for (int s = 1; s <= h.horizon; ++s) {
    std::vector<BitString> admitted;
    for (const BitString& str : hat_enumeration(op, h, s)) {
      if (static_cast<int>(str.length()) < s) admitted.push_back(str);
    }
    ca.stages[static_cast<std::size_t>(s)] = minimal_strings(admitted);
  }
  ca.true_stages = true_stages(h);

  std::set<int> final_oracle = h.final_set();
  std::vector<BitString> limit;
  for (const Axiom& a : op.axioms) {
    if (a.condition.holds(final_oracle)) limit.push_back(a.string);
  }
  std::sort(limit.begin(), limit.end());
  limit.erase(std::unique(limit.begin(), limit.end()), limit.end());
  for (const BitString& s : limit) {
    try {
      ca.limit_set.insert(s);
    } catch (const PrefixConflictError& e) {
      throw NotPrefixFreeLimitError(e.what());
    }
  }
  return ca;
}

std::vector<std::string> check_canonical_laws(
    const CanonicalApproximation& ca) {
  std::vector<std::string> violations;
  for (int s = 0; s <= ca.horizon(); ++s) {
    for (const BitString& m : ca.at(s).members()) {
      if (static_cast<int>(m.length()) >= s) {
        violations.push_back("stage " + std::to_string(s) + ": string " +
                             m.str() + " violates the length bound");
      }
    }
  }
  for (int s : ca.true_stages) {
    if (s > ca.horizon()) continue;
    for (const BitString& m : ca.at(s).members()) {
      if (!ca.limit_set.contains(m)) {
        violations.push_back("true stage " + std::to_string(s) + ": " +
                             m.str() + " not in the limit set");
      }
    }
  }
  for (const BitString& sigma : ca.limit_set.members()) {
    // Least stage from which sigma keeps a prefix in every V_s.
    int since = -1;
    for (int s = ca.horizon(); s >= 1; --s) {
      if (ca.at(s).contains_prefix_of(sigma)) {
        since = s;
      } else {
        break;
      }
    }
    if (since < 0) {
      violations.push_back("limit member " + sigma.str() +
                           " never gains a permanent prefix before the horizon");
    }
  }
  return violations;
}

}  // namespace stagesim
