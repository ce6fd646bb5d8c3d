#ifndef STAGESIM_DYADIC_HPP
#define STAGESIM_DYADIC_HPP

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace stagesim {

/// Exact dyadic rational num / 2^k with arbitrary-precision numerator.
/// Canonical form: the numerator is odd or zero; if zero, k is 0. Every
/// operation is exact; there is no floating point anywhere downstream.
class Dyadic {
 public:
  Dyadic() : num_(0), k_(0) {}
  Dyadic(long value) : num_(value), k_(0) {}  // NOLINT(google-explicit-constructor)

  static Dyadic from_parts(mpz_class numerator, unsigned long log_denominator);
  /// 2^{-e}.
  static Dyadic pow2_neg(unsigned long e);

  const mpz_class& numerator() const { return num_; }
  unsigned long log_denominator() const { return k_; }

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }
  bool is_integer() const { return k_ == 0; }

  Dyadic operator+(const Dyadic& o) const;
  Dyadic operator-(const Dyadic& o) const;
  Dyadic operator-() const;
  /// Exact product with 2^{-e}.
  Dyadic scaled_down(unsigned long e) const;

  Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
  Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }

  bool operator==(const Dyadic& o) const {
    return k_ == o.k_ && num_ == o.num_;
  }
  bool operator!=(const Dyadic& o) const { return !(*this == o); }
  bool operator<(const Dyadic& o) const;
  bool operator<=(const Dyadic& o) const { return *this < o || *this == o; }
  bool operator>(const Dyadic& o) const { return o < *this; }
  bool operator>=(const Dyadic& o) const { return o <= *this; }

  /// Serialized text form, always "num/2^k" (e.g. "3/2^2", "1/2^0").
  std::string to_string() const;
  /// Parses "num/2^k"; a bare integer "n" is accepted as n/2^0.
  static std::optional<Dyadic> parse(std::string_view text);

 private:
  void canonicalize();

  mpz_class num_;
  unsigned long k_;
};

}  // namespace stagesim

#endif  // STAGESIM_DYADIC_HPP
