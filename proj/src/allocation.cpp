#include "stagesim/allocation.hpp"

#include <optional>
#include <set>

#include "stagesim/errors.hpp"

namespace stagesim {

namespace {

// Disjoint cylinders covering the space outside the reserved cone and
// outside all members allocated so far.
class FreeRegion {
 public:
  explicit FreeRegion(const BitString& reserved) {
    for (std::size_t j = 0; j < reserved.length(); ++j) {
      bases_.insert(reserved.prefix(j).with_bit(!reserved.bit(j)));
    }
  }

  // Lexicographically least string of length k whose cylinder is free.
  std::optional<BitString> least_of_length(std::size_t k) const {
    std::optional<BitString> best;
    for (const BitString& b : bases_) {
      if (b.length() > k) continue;
      BitString candidate = b.concat(BitString::zeros(k - b.length()));
      if (!best || candidate < *best) best = candidate;
    }
    return best;
  }

  // Removes the cylinder of `taken` (which must extend one base); the
  // siblings along the path from the base stay free.
  void take(const BitString& taken) {
    auto it = bases_.begin();
    for (; it != bases_.end(); ++it) {
      if (it->is_prefix_of(taken)) break;
    }
    BitString base = *it;
    bases_.erase(it);
    for (std::size_t i = base.length(); i < taken.length(); ++i) {
      bases_.insert(taken.prefix(i).with_bit(!taken.bit(i)));
    }
  }

 private:
  std::set<BitString> bases_;
};

// Exponents e with 2^{-e} appearing in the binary expansion of delta.
std::vector<unsigned long> power_decomposition(const Dyadic& delta) {
  std::vector<unsigned long> exps;
  const mpz_class& num = delta.numerator();
  unsigned long k = delta.log_denominator();
  for (unsigned long bit = 0; bit <= mpz_sizeinbase(num.get_mpz_t(), 2); ++bit) {
    if (mpz_tstbit(num.get_mpz_t(), bit)) {
      exps.push_back(k - bit);  // bit <= k because delta <= 1
    }
  }
  return exps;  // descending power size = ascending exponent not guaranteed; sort below
}

void allocate_power(unsigned long k, FreeRegion& free_region,
                    PrefixFreeSet& set) {
  auto candidate = free_region.least_of_length(k);
  if (candidate) {
    free_region.take(*candidate);
    set.insert(*candidate);
    return;
  }
  // No cylinder of size 2^{-k} is free in one piece; allocate two halves.
  allocate_power(k + 1, free_region, set);
  allocate_power(k + 1, free_region, set);
}

}  // namespace

std::vector<PrefixFreeSet> kc_allocate(const AllocationRequest& request) {
  const std::size_t e = request.reserved.length();
  const Dyadic capacity = Dyadic(1) - Dyadic::pow2_neg(e);

  Dyadic previous;
  for (std::size_t t = 0; t < request.stage_targets.size(); ++t) {
    const Dyadic& target = request.stage_targets[t];
    if (target.is_negative()) {
      throw InvalidArgumentError("stage target " + target.to_string() +
                                 " is negative");
    }
    if (target >= capacity) {
      throw CapacityExceededError("target " + target.to_string() +
                                  " >= 1 - 2^-" + std::to_string(e));
    }
    if (t > 0 && target < previous) {
      throw NonMonotoneTargetError("target " + target.to_string() +
                                   " decreases below " + previous.to_string());
    }
    previous = target;
  }

  FreeRegion free_region(request.reserved);
  PrefixFreeSet current;
  std::vector<PrefixFreeSet> stages;
  stages.reserve(request.stage_targets.size());
  Dyadic allocated;
  for (const Dyadic& target : request.stage_targets) {
    Dyadic delta = target - allocated;
    std::vector<unsigned long> exps = power_decomposition(delta);
    std::sort(exps.begin(), exps.end());  // largest pieces first
    for (unsigned long k : exps) {
      allocate_power(k, free_region, current);
    }
    allocated = target;
    stages.push_back(current);
  }
  return stages;
}

}  // namespace stagesim
