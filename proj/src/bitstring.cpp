#include "stagesim/bitstring.hpp"

#include "stagesim/errors.hpp"

namespace stagesim {

BitString::BitString(std::string_view bits) : bits_(bits) {
  for (char c : bits_) {
    if (c != '0' && c != '1') {
      throw InvalidArgumentError("bit string may contain only 0/1, got \"" +
                                 std::string(bits) + "\"");
    }
  }
}

BitString BitString::zeros(std::size_t n) {
  BitString s;
  s.bits_.assign(n, '0');
  return s;
}

BitString BitString::ones(std::size_t n) {
  BitString s;
  s.bits_.assign(n, '1');
  return s;
}

bool BitString::is_prefix_of(const BitString& other) const {
  return bits_.size() <= other.bits_.size() &&
         other.bits_.compare(0, bits_.size(), bits_) == 0;
}

bool BitString::compatible_with(const BitString& other) const {
  return is_prefix_of(other) || other.is_prefix_of(*this);
}

BitString BitString::prefix(std::size_t n) const {
  BitString s;
  s.bits_ = bits_.substr(0, n);
  return s;
}

BitString BitString::suffix_from(std::size_t n) const {
  BitString s;
  s.bits_ = n >= bits_.size() ? std::string() : bits_.substr(n);
  return s;
}

BitString BitString::concat(const BitString& tail) const {
  BitString s;
  s.bits_ = bits_ + tail.bits_;
  return s;
}

BitString BitString::with_bit(bool b) const {
  BitString s;
  s.bits_ = bits_ + (b ? '1' : '0');
  return s;
}

std::vector<BitString> all_strings_of_length(std::size_t n) {
  if (n > 24) {
    throw InvalidArgumentError("refusing to enumerate 2^" + std::to_string(n) +
                               " strings");
  }
  std::vector<BitString> out;
  out.reserve(std::size_t{1} << n);
  std::string cur(n, '0');
  for (std::size_t v = 0; v < (std::size_t{1} << n); ++v) {
    for (std::size_t i = 0; i < n; ++i) {
      cur[i] = ((v >> (n - 1 - i)) & 1) ? '1' : '0';
    }
    out.emplace_back(cur);
  }
  return out;
}

}  // namespace stagesim
