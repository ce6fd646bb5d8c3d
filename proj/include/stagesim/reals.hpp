#ifndef STAGESIM_REALS_HPP
#define STAGESIM_REALS_HPP

#include <optional>
#include <utility>
#include <vector>

#include "stagesim/approximation.hpp"
#include "stagesim/dyadic.hpp"

namespace stagesim {

enum class Direction { Increasing, Decreasing };

/// A stage-indexed monotone sequence of exact dyadics standing for a
/// monotonically approximated real. The declared limit is metadata only;
/// verifiers work from the stage values.
struct MonotoneRealApprox {
  Direction direction = Direction::Increasing;
  std::vector<Dyadic> values;
  std::optional<Dyadic> declared_limit;

  int horizon() const { return static_cast<int>(values.size()) - 1; }
  const Dyadic& at(int s) const;
  Dyadic max_value() const;
  /// Checks the direction; throws InvalidArgumentError on violation.
  void validate() const;
};

/// Formal difference of two increasing approximations, with the stagewise
/// values kept explicitly so the identity values[s] = left[s] - right[s]
/// is checkable.
struct DCERealApprox {
  MonotoneRealApprox left;
  MonotoneRealApprox right;
  std::vector<Dyadic> values;

  static DCERealApprox make(MonotoneRealApprox left, MonotoneRealApprox right);
  void validate() const;
};

/// Increasing weight sequence derived from a canonical approximation: a
/// member is counted from the first stage of the interval over which it
/// stays in every V_t through the horizon. The declared limit is the
/// weight of the limit set.
MonotoneRealApprox weight_real(const CanonicalApproximation& ca);

/// The rewriting (a - b) = (q - b) - (q - a): returns the two decreasing
/// sequences (q - b, q - a). Throws QTooSmallError when q does not
/// dominate both sequences (stage values and declared limits).
std::pair<MonotoneRealApprox, MonotoneRealApprox> rewrite_right_difference(
    const MonotoneRealApprox& a, const MonotoneRealApprox& b, const Dyadic& q);

/// Least e such that s -> g_s - 2^{-e} a_s is nondecreasing across the
/// whole horizon. Throws NoExponentError when no e <= max_exponent works.
int ks_exponent_search(const MonotoneRealApprox& g, const MonotoneRealApprox& a,
                       int max_exponent = 64);

/// (a + g, b + g) stagewise; the stagewise difference is unchanged.
std::pair<MonotoneRealApprox, MonotoneRealApprox> shift_by_common(
    const MonotoneRealApprox& a, const MonotoneRealApprox& b,
    const MonotoneRealApprox& g);

}  // namespace stagesim

#endif  // STAGESIM_REALS_HPP
