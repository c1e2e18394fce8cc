#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "error.hpp"

namespace glwords {

/// Exact rational number on int64 with __int128 intermediates.  Every bound
/// in this library (normalized norms, diameter floors, chain bounds,
/// perturbation budgets) is computed exactly; floating point is never used.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit on purpose
  Rational(long long n, long long d) { assign(n, d); }

  long long num() const { return num_; }
  long long den() const { return den_; }

  Rational operator+(const Rational& o) const {
    return make((__int128)num_ * o.den_ + (__int128)o.num_ * den_,
                (__int128)den_ * o.den_);
  }
  Rational operator-(const Rational& o) const {
    return make((__int128)num_ * o.den_ - (__int128)o.num_ * den_,
                (__int128)den_ * o.den_);
  }
  Rational operator*(const Rational& o) const {
    return make((__int128)num_ * o.num_, (__int128)den_ * o.den_);
  }
  Rational operator/(const Rational& o) const {
    require(o.num_ != 0, "division_by_zero", "rational division by zero");
    return make((__int128)num_ * o.den_, (__int128)den_ * o.num_);
  }
  Rational operator-() const { return Rational(-num_, den_); }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    return (__int128)num_ * o.den_ < (__int128)o.num_ * den_;
  }
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return o <= *this; }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Parses "a" or "a/b".  Used for the CLI --epsilon flag.
  static Rational parse(const std::string& s) {
    auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return Rational(std::stoll(s));
      long long n = std::stoll(s.substr(0, slash));
      long long d = std::stoll(s.substr(slash + 1));
      require(d != 0, "parse_error", "rational with zero denominator: " + s);
      return Rational(n, d);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail("parse_error", "cannot parse rational: " + s);
    }
  }

 private:
  static Rational make(__int128 n, __int128 d) {
    Rational r;
    if (d < 0) { n = -n; d = -d; }
    __int128 an = n < 0 ? -n : n;
    __int128 g = gcd128(an, d);
    if (g > 1) { n /= g; d /= g; }
    constexpr __int128 lo = INT64_MIN, hi = INT64_MAX;
    require(n >= lo && n <= hi && d <= hi, "overflow", "rational overflow");
    r.num_ = (long long)n;
    r.den_ = (long long)d;
    return r;
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b) { __int128 t = a % b; a = b; b = t; }
    return a;
  }

  void assign(long long n, long long d) {
    require(d != 0, "division_by_zero", "rational with zero denominator");
    *this = make(n, d);
  }

  long long num_, den_;
};

}  // namespace glwords
