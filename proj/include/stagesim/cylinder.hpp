#ifndef STAGESIM_CYLINDER_HPP
#define STAGESIM_CYLINDER_HPP

#include "stagesim/bitstring.hpp"
#include "stagesim/dyadic.hpp"

namespace stagesim {

/// The set of infinite binary streams extending a finite base string.
struct Cylinder {
  BitString base;
  Dyadic measure() const { return Dyadic::pow2_neg(base.length()); }
};

inline Dyadic cylinder_measure(const Cylinder& c) { return c.measure(); }

}  // namespace stagesim

#endif  // STAGESIM_CYLINDER_HPP
