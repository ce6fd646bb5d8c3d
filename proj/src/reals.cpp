#include "stagesim/reals.hpp"

#include <string>

#include "stagesim/errors.hpp"

namespace stagesim {

const Dyadic& MonotoneRealApprox::at(int s) const {
  if (s < 0 || s >= static_cast<int>(values.size())) {
    throw HorizonExceededError("stage " + std::to_string(s) +
                               " outside real-approximation horizon");
  }
  return values[static_cast<std::size_t>(s)];
}

Dyadic MonotoneRealApprox::max_value() const {
  Dyadic m;
  for (const Dyadic& v : values) {
    if (v > m) m = v;
  }
  return m;
}

void MonotoneRealApprox::validate() const {
  for (std::size_t s = 1; s < values.size(); ++s) {
    bool ok = direction == Direction::Increasing
                  ? values[s - 1] <= values[s]
                  : values[s] <= values[s - 1];
    if (!ok) {
      throw InvalidArgumentError("sequence is not " +
                                 std::string(direction == Direction::Increasing
                                                 ? "nondecreasing"
                                                 : "nonincreasing") +
                                 " at stage " + std::to_string(s));
    }
  }
}

DCERealApprox DCERealApprox::make(MonotoneRealApprox left,
                                  MonotoneRealApprox right) {
  if (left.values.size() != right.values.size()) {
    throw InvalidArgumentError("d.c.e. components disagree on the horizon");
  }
  if (left.direction != Direction::Increasing ||
      right.direction != Direction::Increasing) {
    throw InvalidArgumentError("d.c.e. components must both be increasing");
  }
  left.validate();
  right.validate();
  DCERealApprox d;
  d.values.reserve(left.values.size());
  for (std::size_t s = 0; s < left.values.size(); ++s) {
    d.values.push_back(left.values[s] - right.values[s]);
  }
  d.left = std::move(left);
  d.right = std::move(right);
  return d;
}

void DCERealApprox::validate() const {
  if (values.size() != left.values.size() ||
      values.size() != right.values.size()) {
    throw InvalidArgumentError("d.c.e. value vector length mismatch");
  }
  for (std::size_t s = 0; s < values.size(); ++s) {
    if (values[s] != left.values[s] - right.values[s]) {
      throw InvalidArgumentError("d.c.e. value differs from left - right at stage " +
                                 std::to_string(s));
    }
  }
}

MonotoneRealApprox weight_real(const CanonicalApproximation& ca) {
  const int horizon = ca.horizon();
  MonotoneRealApprox out;
  out.direction = Direction::Increasing;
  out.values.assign(static_cast<std::size_t>(horizon) + 1, Dyadic());
  if (horizon >= 1) {
    // Members stable through the horizon, keyed by the stage their
    // stability interval begins.
    for (const BitString& sigma : ca.at(horizon).members()) {
      int since = horizon;
      while (since > 1 && ca.at(since - 1).contains(sigma)) --since;
      Dyadic w = Dyadic::pow2_neg(sigma.length());
      for (int s = since; s <= horizon; ++s) {
        out.values[static_cast<std::size_t>(s)] += w;
      }
    }
  }
  out.declared_limit = ca.limit_set.weight();
  return out;
}

std::pair<MonotoneRealApprox, MonotoneRealApprox> rewrite_right_difference(
    const MonotoneRealApprox& a, const MonotoneRealApprox& b,
    const Dyadic& q) {
  if (a.direction != Direction::Increasing ||
      b.direction != Direction::Increasing) {
    throw InvalidArgumentError("rewrite requires increasing inputs");
  }
  if (a.values.size() != b.values.size()) {
    throw InvalidArgumentError("rewrite requires a common horizon");
  }
  a.validate();
  b.validate();
  auto dominates = [&q](const MonotoneRealApprox& x, const char* name) {
    if (q <= x.max_value()) {
      throw QTooSmallError("q = " + q.to_string() +
                           " does not dominate the stage values of " + name);
    }
    if (x.declared_limit && q <= *x.declared_limit) {
      throw QTooSmallError("q = " + q.to_string() +
                           " does not dominate the declared limit of " + name);
    }
  };
  dominates(a, "a");
  dominates(b, "b");

  auto flip = [&q](const MonotoneRealApprox& x) {
    MonotoneRealApprox out;
    out.direction = Direction::Decreasing;
    out.values.reserve(x.values.size());
    for (const Dyadic& v : x.values) out.values.push_back(q - v);
    if (x.declared_limit) out.declared_limit = q - *x.declared_limit;
    return out;
  };
  return {flip(b), flip(a)};
}

int ks_exponent_search(const MonotoneRealApprox& g, const MonotoneRealApprox& a,
                       int max_exponent) {
  if (g.direction != Direction::Increasing ||
      a.direction != Direction::Increasing) {
    throw InvalidArgumentError("exponent search requires increasing inputs");
  }
  if (g.values.size() != a.values.size()) {
    throw InvalidArgumentError("exponent search requires a common horizon");
  }
  g.validate();
  a.validate();
  for (int e = 0; e <= max_exponent; ++e) {
    bool ok = true;
    for (std::size_t s = 1; s < g.values.size(); ++s) {
      Dyadic dg = g.values[s] - g.values[s - 1];
      Dyadic da = a.values[s] - a.values[s - 1];
      if (dg < da.scaled_down(static_cast<unsigned long>(e))) {
        ok = false;
        break;
      }
    }
    if (ok) return e;
  }
  throw NoExponentError("no exponent up to " + std::to_string(max_exponent) +
                        " makes g - 2^{-e} a nondecreasing");
}

std::pair<MonotoneRealApprox, MonotoneRealApprox> shift_by_common(
    const MonotoneRealApprox& a, const MonotoneRealApprox& b,
    const MonotoneRealApprox& g) {
  if (a.direction != Direction::Increasing ||
      b.direction != Direction::Increasing ||
      g.direction != Direction::Increasing) {
    throw InvalidArgumentError("shift requires increasing inputs");
  }
  if (a.values.size() != b.values.size() ||
      a.values.size() != g.values.size()) {
    throw InvalidArgumentError("shift requires a common horizon");
  }
  auto add = [](const MonotoneRealApprox& x, const MonotoneRealApprox& y) {
    MonotoneRealApprox out;
    out.direction = Direction::Increasing;
    out.values.reserve(x.values.size());
    for (std::size_t s = 0; s < x.values.size(); ++s) {
      out.values.push_back(x.values[s] + y.values[s]);
    }
    if (x.declared_limit && y.declared_limit) {
      out.declared_limit = *x.declared_limit + *y.declared_limit;
    }
    return out;
  };
  return {add(a, g), add(b, g)};
}

}  // namespace stagesim
