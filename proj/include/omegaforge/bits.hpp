#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace omegaforge {

// A finite binary string. Stored as ASCII '0'/'1' so values double as their
// serialized form. Comparison is plain lexicographic order on the character
// sequence, which puts a proper prefix before each of its extensions; this is
// a strict total order and is the one canonical ordering used everywhere.
class Bits {
public:
  Bits() = default;

  static Bits zeros(std::size_t n) { return Bits(std::string(n, '0')); }
  static Bits ones(std::size_t n) { return Bits(std::string(n, '1')); }

  // Strict parse: only '0'/'1' characters. The single token "ε" (or empty
  // text) denotes the empty string.
  static std::optional<Bits> parse(std::string_view text) {
    if (text.empty() || text == "\xce\xb5") return Bits();
    for (char c : text)
      if (c != '0' && c != '1') return std::nullopt;
    return Bits(std::string(text));
  }

  // The i-th string of the given length, counting in lexicographic order.
  static Bits of_length(unsigned length, std::uint64_t index) {
    std::string s(length, '0');
    for (unsigned i = 0; i < length; ++i)
      if (index >> (length - 1 - i) & 1u) s[i] = '1';
    return Bits(std::move(s));
  }

  std::size_t size() const { return s_.size(); }
  bool empty() const { return s_.empty(); }
  int bit(std::size_t i) const { return s_[i] - '0'; }

  Bits prefix(std::size_t n) const { return Bits(s_.substr(0, n)); }
  // Remainder after dropping the first n characters; n must be <= size().
  Bits suffix_from(std::size_t n) const { return Bits(s_.substr(n)); }

  bool is_prefix_of(const Bits& other) const {
    return s_.size() <= other.s_.size() &&
           other.s_.compare(0, s_.size(), s_) == 0;
  }
  bool is_proper_prefix_of(const Bits& other) const {
    return s_.size() < other.s_.size() && is_prefix_of(other);
  }
  bool compatible_with(const Bits& other) const {
    return is_prefix_of(other) || other.is_prefix_of(*this);
  }

  Bits operator+(const Bits& rhs) const { return Bits(s_ + rhs.s_); }
  Bits with_bit(int b) const { return Bits(s_ + char('0' + b)); }

  const std::string& str() const { return s_; }
  // Human-readable form: the empty string prints as "ε".
  std::string display() const { return s_.empty() ? "\xce\xb5" : s_; }

  auto operator<=>(const Bits&) const = default;

private:
  explicit Bits(std::string s) : s_(std::move(s)) {}
  std::string s_;
};

// All strings of length <= max_len, grouped by length, lexicographic within
// each length.
inline std::vector<Bits> all_strings_up_to(unsigned max_len) {
  std::vector<Bits> out;
  out.push_back(Bits());
  for (unsigned len = 1; len <= max_len; ++len)
    for (std::uint64_t i = 0; i < (std::uint64_t(1) << len); ++i)
      out.push_back(Bits::of_length(len, i));
  return out;
}

}  // namespace omegaforge
