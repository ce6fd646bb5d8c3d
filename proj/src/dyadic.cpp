#include "stagesim/dyadic.hpp"

#include <algorithm>
#include <cctype>

#include "stagesim/errors.hpp"

namespace stagesim {

void Dyadic::canonicalize() {
  if (num_ == 0) {
    k_ = 0;
    return;
  }
  unsigned long twos = mpz_scan1(num_.get_mpz_t(), 0);
  unsigned long strip = std::min(twos, k_);
  if (strip > 0) {
    num_ >>= strip;
    k_ -= strip;
  }
}

Dyadic Dyadic::from_parts(mpz_class numerator, unsigned long log_denominator) {
  Dyadic d;
  d.num_ = std::move(numerator);
  d.k_ = log_denominator;
  d.canonicalize();
  return d;
}

Dyadic Dyadic::pow2_neg(unsigned long e) { return from_parts(1, e); }

Dyadic Dyadic::operator+(const Dyadic& o) const {
  unsigned long k = std::max(k_, o.k_);
  mpz_class a = num_ << (k - k_);
  mpz_class b = o.num_ << (k - o.k_);
  return from_parts(a + b, k);
}

Dyadic Dyadic::operator-(const Dyadic& o) const { return *this + (-o); }

Dyadic Dyadic::operator-() const {
  Dyadic d;
  d.num_ = -num_;
  d.k_ = k_;
  return d;
}

Dyadic Dyadic::scaled_down(unsigned long e) const {
  return from_parts(num_, k_ + e);
}

bool Dyadic::operator<(const Dyadic& o) const {
  unsigned long k = std::max(k_, o.k_);
  mpz_class a = num_ << (k - k_);
  mpz_class b = o.num_ << (k - o.k_);
  return a < b;
}

std::string Dyadic::to_string() const {
  return num_.get_str() + "/2^" + std::to_string(k_);
}

std::optional<Dyadic> Dyadic::parse(std::string_view text) {
  auto is_int = [](std::string_view s) {
    if (!s.empty() && s.front() == '-') s.remove_prefix(1);
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c); });
  };
  std::string_view num_part = text;
  std::string_view k_part = "0";
  auto slash = text.find("/2^");
  if (slash != std::string_view::npos) {
    num_part = text.substr(0, slash);
    k_part = text.substr(slash + 3);
  }
  if (!is_int(num_part) || !is_int(k_part) || k_part.front() == '-') {
    return std::nullopt;
  }
  mpz_class num;
  if (num.set_str(std::string(num_part), 10) != 0) return std::nullopt;
  unsigned long k = 0;
  try {
    k = std::stoul(std::string(k_part));
  } catch (...) {
    return std::nullopt;
  }
  return from_parts(std::move(num), k);
}

}  // namespace stagesim
