#ifndef STAGESIM_BITSTRING_HPP
#define STAGESIM_BITSTRING_HPP

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace stagesim {

/// A finite binary string. The empty string is a valid value and acts as
/// the root of the prefix order. Ordering is plain lexicographic on the
/// bit characters, so a string sorts immediately before its extensions.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::string_view bits);

  static BitString zeros(std::size_t n);
  static BitString ones(std::size_t n);

  std::size_t length() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool bit(std::size_t i) const { return bits_[i] == '1'; }

  bool is_prefix_of(const BitString& other) const;
  bool compatible_with(const BitString& other) const;

  BitString prefix(std::size_t n) const;
  BitString suffix_from(std::size_t n) const;
  BitString concat(const BitString& tail) const;
  BitString with_bit(bool b) const;

  const std::string& str() const { return bits_; }

  auto operator<=>(const BitString&) const = default;

 private:
  std::string bits_;  // characters '0'/'1' only
};

/// All 2^n strings of length n in lexicographic order. Intended for
/// brute-force enumeration; n is capped at desk scale.
std::vector<BitString> all_strings_of_length(std::size_t n);

inline bool compatible(const BitString& a, const BitString& b) {
  return a.compatible_with(b);
}

}  // namespace stagesim

#endif  // STAGESIM_BITSTRING_HPP
