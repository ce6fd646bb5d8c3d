#ifndef STAGESIM_CONSTRUCTIONS_HPP
#define STAGESIM_CONSTRUCTIONS_HPP

#include <string>
#include <vector>

#include "stagesim/allocation.hpp"
#include "stagesim/approximation.hpp"
#include "stagesim/machine.hpp"
#include "stagesim/reals.hpp"

namespace stagesim {

/// Block-schedule padding machine. At stage s+1 every string sigma of
/// length 2^{s+1}-1 with prefix tau of length 2^s-1 is defined: when sigma
/// has a prefix in Q_s the new block is all zeros (padding rule), otherwise
/// the block repeats the last bits of sigma (copy rule). |M(sigma)| equals
/// |sigma| on every block and M is total on blocks.
/// `stages` is the number of block stages, capped at 4 (block length 15).
MonotoneMachine build_padding_machine(const CanonicalApproximation& q,
                                      int stages, std::string id);

/// Totality machine: at stage s+1 every sigma with |sigma| <= s lacking a
/// prefix in Q_s gets value 0^{|sigma|} (once). Strings inside the
/// eventually-covered part of Q stay undefined at their frontier.
MonotoneMachine build_totality_machine(const CanonicalApproximation& q,
                                       int stages, std::string id);

/// Maps every string compatible with rho to the empty string and keeps m
/// on strings incompatible with rho.
MonotoneMachine cone_restrict(const MonotoneMachine& m, const BitString& rho,
                              std::string id);

/// result(0^e * sigma) = inner(sigma); result(tau) = outer(tau) for tau
/// incompatible with 0^e. Requires outer to map the 0^e cone to the empty
/// string (ConeNotEmptyError otherwise). e >= 1.
MonotoneMachine splice(int e, const MonotoneMachine& inner,
                       const MonotoneMachine& outer, std::string id);

/// Finite-list universal machine with coding prefix 0^e 1 for the e-th
/// machine; strings in no coded cone (the all-zeros cone) map to the empty
/// string.
MonotoneMachine build_universal(const std::vector<const MonotoneMachine*>& machines,
                                std::string id);

/// A machine built against exact stage targets, together with the target
/// trace it provably realizes (aligned to machine stages: allocation stage
/// t is consulted by machine stage t+1, and pieces count once the frontier
/// reaches their length).
struct TargetedMachine {
  MonotoneMachine machine;
  std::vector<Dyadic> aligned_targets;  // index = machine stage
  std::vector<PrefixFreeSet> allocation;
  BitString reserved;
};

/// Padding machine over a Kraft-Chaitin allocation avoiding rho, restricted
/// to the rho cone; aligned_targets carries the exact ENDS_IN_ZEROS trace.
/// targets[t] is the allocation weight after stage t+1.
TargetedMachine make_machine_cor34(const BitString& rho,
                                   const std::vector<Dyadic>& targets,
                                   std::string id);

/// Totality machine over an allocation solved against the requested TOTAL
/// measures (targets[t] is the requested TOTAL realized once the frontier
/// matures); aligned_targets carries the exact TOTAL trace including the
/// early cone shadow.
TargetedMachine make_machine_cor36(const BitString& rho,
                                   const std::vector<Dyadic>& targets,
                                   std::string id);

enum class CaseTag { LeftCE, RightCE, NotRandom };
std::string case_tag_name(CaseTag tag);

/// A spliced universal machine together with everything needed to audit
/// its stage identities.
struct Orchestration {
  MonotoneMachine spliced;
  MonotoneMachine inner;  // the base universal
  TargetedMachine outer;
  int exponent = 1;
  std::string trace_class;          // class the identity is stated for
  std::vector<Dyadic> requested;    // the trace handed in (g or a-b)
  std::vector<Dyadic> inner_trace;  // stage measures of the base universal
  /// First stage from which the measured trace equals the requested one.
  int maturity_stage = 0;
};

/// Universal machine whose ENDS_IN_ZEROS trace equals g stage by stage:
/// finds e with g - 2^{-e} p0 nondecreasing and within the cone capacity,
/// allocates the outer targets, splices the base universal into the 0^e
/// cone, and verifies the reconstruction exactly.
Orchestration make_universal_leftce(
    const MonotoneRealApprox& g,
    const std::vector<const MonotoneMachine*>& base_machines, std::string id);

/// Universal machine for a difference trace a-b under a declared case tag.
/// left_ce delegates to make_universal_leftce on the difference; the other
/// branches build the outer machine from the requested TOTAL targets
/// (a-b) - 2^{-e} delta and splice.
Orchestration make_universal_dce(
    const MonotoneRealApprox& a, const MonotoneRealApprox& b, CaseTag tag,
    const std::vector<const MonotoneMachine*>& base_machines, std::string id);

/// Deterministic desk-scale base list for universal constructions: a
/// padding machine padding everywhere from stage 2 on, and a totality
/// machine over the empty set.
std::vector<MonotoneMachine> default_base_machines(int stages);

}  // namespace stagesim

#endif  // STAGESIM_CONSTRUCTIONS_HPP
