#ifndef STAGESIM_ALLOCATION_HPP
#define STAGESIM_ALLOCATION_HPP

#include <vector>

#include "stagesim/bitstring.hpp"
#include "stagesim/dyadic.hpp"
#include "stagesim/prefix_set.hpp"

namespace stagesim {

/// Request for a staged prefix-free allocation avoiding the reserved cone.
/// Every target must stay strictly below 1 - 2^{-|reserved|} and the target
/// sequence must be nondecreasing.
struct AllocationRequest {
  BitString reserved;
  std::vector<Dyadic> stage_targets;
};

/// Builds the cumulative sets S_0 <= S_1 <= ... with set_measure(S_t) equal
/// to stage_targets[t] exactly and every member incompatible with the
/// reserved string.
///
/// Strategy: each dyadic increment is decomposed into powers of two; for a
/// power 2^{-k} the lexicographically least available string of length k is
/// taken, where available means incompatible with the reserved string and
/// with all members so far. When no string of length k is available the
/// power is split into two of length k+1, which always succeeds under the
/// capacity precondition.
///
/// Throws CapacityExceededError / NonMonotoneTargetError.
std::vector<PrefixFreeSet> kc_allocate(const AllocationRequest& request);

}  // namespace stagesim

#endif  // STAGESIM_ALLOCATION_HPP
