#pragma once

#include <compare>
#include <string>
#include <utility>

#include "omegaforge/dyadic.hpp"
#include "omegaforge/errors.hpp"

namespace omegaforge {

// Exact rational p/q. Only the test-construction bookkeeping needs full
// rationals (the margin shrink factor eps/(1+eps) leaves the dyadics);
// everything else in the project stays dyadic.
class Rational {
public:
  Rational() = default;
  Rational(long v) : num_(v) {}  // NOLINT
  Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_ == 0) throw domain_error("rational with zero denominator");
    normalize();
  }
  Rational(const Dyadic& d) : num_(d.num()), den_(BigInt(1) << d.exp()) {}  // NOLINT

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }
  bool is_zero() const { return num_ == 0; }

  Rational operator+(const Rational& r) const {
    return Rational(num_ * r.den_ + r.num_ * den_, den_ * r.den_);
  }
  Rational operator-(const Rational& r) const {
    return Rational(num_ * r.den_ - r.num_ * den_, den_ * r.den_);
  }
  Rational operator*(const Rational& r) const {
    return Rational(num_ * r.num_, den_ * r.den_);
  }
  Rational operator/(const Rational& r) const {
    if (r.num_ == 0) throw domain_error("rational division by zero");
    return Rational(num_ * r.den_, den_ * r.num_);
  }
  Rational operator-() const { return Rational(-num_, den_); }
  Rational& operator+=(const Rational& r) { return *this = *this + r; }

  bool operator==(const Rational& r) const {
    return num_ == r.num_ && den_ == r.den_;
  }
  std::strong_ordering operator<=>(const Rational& r) const {
    BigInt a = num_ * r.den_, b = r.num_ * den_;
    if (a < b) return std::strong_ordering::less;
    if (a > b) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  std::string to_string() const {
    if (den_ == 1) return num_.str();
    return num_.str() + "/" + den_.str();
  }

private:
  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    BigInt g = boost::multiprecision::gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  BigInt num_ = 0;
  BigInt den_ = 1;
};

}  // namespace omegaforge
