#ifndef STAGESIM_APPROXIMATION_HPP
#define STAGESIM_APPROXIMATION_HPP

#include <optional>
#include <set>
#include <vector>

#include "stagesim/bitstring.hpp"
#include "stagesim/prefix_set.hpp"

namespace stagesim {

/// Finite stand-in for the halting set together with its enumeration.
/// At most one number enters per stage and every number enters once.
struct MockHaltingSet {
  struct Event {
    int stage = 0;
    int number = 0;
  };
  std::vector<Event> events;  // strictly increasing stages
  int horizon = 0;            // last stage of interest, >= last event stage

  /// Numbers enumerated by stage s (inclusive).
  std::set<int> enumerated_up_to(int s) const;
  std::set<int> final_set() const;
  void validate() const;
};

/// One enumeration axiom of a mock c.e. operator: the string enters the
/// enumeration at appearance_stage provided the oracle constraints hold.
struct OracleCondition {
  std::set<int> required_in;
  std::set<int> required_out;

  bool holds(const std::set<int>& oracle) const;
  /// 1 + the largest number mentioned; 0 when nothing is mentioned.
  int use() const;
};

struct Axiom {
  BitString string;
  OracleCondition condition;
  int appearance_stage = 1;
};

struct MockCEOperator {
  std::vector<Axiom> axioms;
  void validate() const;
};

/// Stagewise approximation (V_s) of the prefix-free set enumerated by a
/// mock operator relative to a mock halting set, together with the stages
/// detected as true and the limit set determined by the final oracle.
struct CanonicalApproximation {
  std::vector<PrefixFreeSet> stages;  // index = stage, 0..horizon
  std::set<int> true_stages;
  PrefixFreeSet limit_set;

  int horizon() const { return static_cast<int>(stages.size()) - 1; }
  const PrefixFreeSet& at(int s) const;
};

/// The delayed enumeration at stage s: axioms whose condition holds at the
/// stage-s oracle and whose appearance stage has passed, withholding any
/// axiom whose oracle use exceeds a number freshly enumerated at s (the
/// segment below the use must be stable across the previous and current
/// stage). Returns the strings sorted and deduplicated.
std::vector<BitString> hat_enumeration(const MockCEOperator& op,
                                       const MockHaltingSet& h, int s);

/// Stages s carrying an event (s, n) such that no later event enumerates a
/// number below n.
std::set<int> true_stages(const MockHaltingSet& h);

/// Builds the full stagewise approximation. V_s keeps the prefix-minimal
/// strings of the stage-s enumeration, restricted to strings of length
/// less than s; longer strings are delayed until the stage index passes
/// their length. Throws NotPrefixFreeLimitError when the final oracle
/// admits compatible strings.
CanonicalApproximation build_canonical(const MockCEOperator& op,
                                       const MockHaltingSet& h);

/// Invariant report for a canonical approximation (empty = all hold):
/// length bounds, containment V_s <= limit at true stages, and the
/// permanent-prefix law for limit members.
std::vector<std::string> check_canonical_laws(const CanonicalApproximation& ca);

}  // namespace stagesim

#endif  // STAGESIM_APPROXIMATION_HPP
