#pragma once

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <string>
#include <vector>

#include "omegaforge/errors.hpp"

namespace omegaforge {

using BigInt = boost::multiprecision::cpp_int;

// Exact dyadic rational num / 2^exp with arbitrary-precision numerator.
// Normal form: exp is minimal, i.e. whenever exp > 0 the numerator is odd
// (zero is stored as 0 / 2^0). All arithmetic is exact; no rounding anywhere.
class Dyadic {
public:
  Dyadic() = default;
  Dyadic(long v) : num_(v) {}  // NOLINT: implicit integers are convenient
  Dyadic(BigInt num, unsigned exp) : num_(std::move(num)), exp_(exp) { normalize(); }

  static Dyadic pow2_neg(unsigned c) { return Dyadic(1, c); }

  const BigInt& num() const { return num_; }
  unsigned exp() const { return exp_; }

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }

  Dyadic operator+(const Dyadic& rhs) const {
    unsigned e = std::max(exp_, rhs.exp_);
    return Dyadic(scaled(e) + rhs.scaled(e), e);
  }
  Dyadic operator-(const Dyadic& rhs) const {
    unsigned e = std::max(exp_, rhs.exp_);
    return Dyadic(scaled(e) - rhs.scaled(e), e);
  }
  Dyadic operator*(const Dyadic& rhs) const {
    return Dyadic(num_ * rhs.num_, exp_ + rhs.exp_);
  }
  Dyadic operator-() const { return Dyadic(-num_, exp_); }
  Dyadic& operator+=(const Dyadic& rhs) { return *this = *this + rhs; }
  Dyadic& operator-=(const Dyadic& rhs) { return *this = *this - rhs; }

  bool operator==(const Dyadic& rhs) const {
    return exp_ == rhs.exp_ && num_ == rhs.num_;
  }
  std::strong_ordering operator<=>(const Dyadic& rhs) const {
    unsigned e = std::max(exp_, rhs.exp_);
    BigInt a = scaled(e), b = rhs.scaled(e);
    if (a < b) return std::strong_ordering::less;
    if (a > b) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  // "p/q" with q = 2^exp in decimal; integers print bare.
  std::string to_string() const {
    if (exp_ == 0) return num_.str();
    BigInt den = BigInt(1) << exp_;
    return num_.str() + "/" + den.str();
  }

  // Decompose a value in [0, 1) into the lengths of its binary expansion:
  // value == sum of 2^-c over the returned c (each c >= 1, strictly
  // increasing). Used to turn approximation increments into weight requests.
  std::vector<unsigned> power_lengths() const {
    if (is_negative() || *this >= Dyadic(1))
      throw domain_error("power_lengths requires a value in [0, 1)");
    std::vector<unsigned> out;
    BigInt n = num_;
    for (unsigned j = 0; n != 0; ++j) {
      if (boost::multiprecision::bit_test(n, 0)) out.push_back(exp_ - j);
      n >>= 1;
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

private:
  void normalize() {
    if (num_ == 0) {
      exp_ = 0;
      return;
    }
    while (exp_ > 0 && !boost::multiprecision::bit_test(num_ < 0 ? BigInt(-num_) : num_, 0)) {
      num_ >>= 1;
      --exp_;
    }
  }
  BigInt scaled(unsigned e) const { return num_ << (e - exp_); }

  BigInt num_ = 0;
  unsigned exp_ = 0;
};

}  // namespace omegaforge
