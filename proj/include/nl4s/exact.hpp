#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include "nl4s/errors.hpp"

namespace nl4s {

/// Normalized int64 fraction; arithmetic reports overflow by returning nullopt.
class Rational {
public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    num_ = g ? num / g : 0;
    den_ = g ? den / g : 1;
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  static std::optional<Rational> make(__int128 num, __int128 den) {
    if (den == 0) return std::nullopt;
    if (den < 0) {
      num = -num;
      den = -den;
    }
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      num /= a;
      den /= a;
    }
    constexpr __int128 lim = std::numeric_limits<std::int64_t>::max();
    if (num > lim || num < -lim || den > lim) return std::nullopt;
    return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
  }

  friend std::optional<Rational> add(Rational a, Rational b) {
    return make(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                static_cast<__int128>(a.den_) * b.den_);
  }
  friend std::optional<Rational> mul(Rational a, Rational b) {
    return make(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend std::optional<Rational> div(Rational a, Rational b) {
    if (b.num_ == 0) return std::nullopt;
    return make(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }
  friend int compare(Rational a, Rational b) {
    const __int128 l = static_cast<__int128>(a.num_) * b.den_;
    const __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l < r ? -1 : (l > r ? 1 : 0);
  }

  /// Best approximation with denominator <= max_den that rounds to `x`
  /// exactly, if one exists.
  static std::optional<Rational> recover(double x, std::int64_t max_den = 1'000'000) {
    if (!std::isfinite(x) || std::abs(x) > 1e12) return std::nullopt;
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int iter = 0; iter < 64; ++iter) {
      const double a = std::floor(r);
      if (std::abs(a) > 1e12) break;
      const auto ai = static_cast<std::int64_t>(a);
      const std::int64_t h2 = ai * h1 + h0;
      const std::int64_t k2 = ai * k1 + k0;
      if (k2 > max_den) break;
      h0 = h1;
      h1 = h2;
      k0 = k1;
      k1 = k2;
      if (static_cast<double>(h1) / static_cast<double>(k1) == x) return Rational(h1, k1);
      const double frac = r - a;
      if (frac == 0.0) break;
      r = 1.0 / frac;
    }
    return std::nullopt;
  }

private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Real number that stays exact while its inputs are rational and falls back
/// to floating point otherwise. Comparisons involving an inexact operand use a
/// relative tolerance of 1e-12.
class Real {
public:
  static constexpr double kTolerance = 1e-12;

  Real() = default;
  Real(int v) : value_(v), exact_(Rational(v, 1)) {}
  Real(Rational r) : value_(r.to_double()), exact_(r) {}
  /// Recovers a short rational when `v` is the double nearest to one.
  static Real from_double(double v) {
    Real out;
    out.value_ = v;
    out.exact_ = Rational::recover(v);
    return out;
  }
  static Real inexact(double v) {
    Real out;
    out.value_ = v;
    return out;
  }

  /// Accepts "p/q" (exact) or a decimal literal.
  static Real parse(const std::string& s) {
    const auto slash = s.find('/');
    try {
      if (slash != std::string::npos) {
        const long long n = std::stoll(s.substr(0, slash));
        const long long d = std::stoll(s.substr(slash + 1));
        if (d == 0) throw ConfigError("zero denominator in '" + s + "'");
        return Real(Rational(n, d));
      }
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
      return from_double(v);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::logic_error&) {
      throw ConfigError("not a number: '" + s + "'");
    }
  }

  double value() const { return value_; }
  bool is_exact() const { return exact_.has_value(); }
  const std::optional<Rational>& exact() const { return exact_; }

  friend Real operator+(const Real& a, const Real& b) {
    return combine(a, b, a.value_ + b.value_, [](Rational x, Rational y) { return add(x, y); });
  }
  friend Real operator-(const Real& a) {
    Real out = a;
    out.value_ = -a.value_;
    if (a.exact_) out.exact_ = Rational(-a.exact_->num(), a.exact_->den());
    return out;
  }
  friend Real operator-(const Real& a, const Real& b) { return a + (-b); }
  friend Real operator*(const Real& a, const Real& b) {
    return combine(a, b, a.value_ * b.value_, [](Rational x, Rational y) { return mul(x, y); });
  }
  friend Real operator/(const Real& a, const Real& b) {
    return combine(a, b, a.value_ / b.value_, [](Rational x, Rational y) { return div(x, y); });
  }

  /// -1, 0, +1; exact when both operands are exact.
  friend int compare(const Real& a, const Real& b) {
    if (a.exact_ && b.exact_) return compare(*a.exact_, *b.exact_);
    const double scale = std::max({1.0, std::abs(a.value_), std::abs(b.value_)});
    const double diff = a.value_ - b.value_;
    if (std::abs(diff) <= kTolerance * scale) return 0;
    return diff < 0 ? -1 : 1;
  }
  friend bool operator==(const Real& a, const Real& b) { return compare(a, b) == 0; }
  friend bool operator<(const Real& a, const Real& b) { return compare(a, b) < 0; }
  friend bool operator<=(const Real& a, const Real& b) { return compare(a, b) <= 0; }
  friend bool operator>(const Real& a, const Real& b) { return compare(a, b) > 0; }
  friend bool operator>=(const Real& a, const Real& b) { return compare(a, b) >= 0; }

  /// Smallest integer >= value (exact for rationals).
  long long ceil() const {
    if (exact_) {
      const auto n = exact_->num();
      const auto d = exact_->den();
      return n >= 0 ? (n + d - 1) / d : -((-n) / d);
    }
    const double r = std::round(value_);
    if (std::abs(value_ - r) <= kTolerance * std::max(1.0, std::abs(value_))) {
      return static_cast<long long>(r);
    }
    return static_cast<long long>(std::ceil(value_));
  }

  bool is_integer() const {
    if (exact_) return exact_->den() == 1;
    const double r = std::round(value_);
    return std::abs(value_ - r) <= kTolerance * std::max(1.0, std::abs(value_));
  }

  bool is_odd_integer() const {
    if (!is_integer()) return false;
    const long long n = exact_ ? exact_->num() : static_cast<long long>(std::round(value_));
    return (n % 2 + 2) % 2 == 1;
  }

  friend std::ostream& operator<<(std::ostream& os, const Real& r) {
    if (r.exact_ && r.exact_->den() != 1) return os << r.exact_->num() << '/' << r.exact_->den();
    if (r.exact_) return os << r.exact_->num();
    return os << r.value_;
  }

private:
  template <class Op>
  static Real combine(const Real& a, const Real& b, double v, Op op) {
    Real out;
    out.value_ = v;
    if (a.exact_ && b.exact_) {
      out.exact_ = op(*a.exact_, *b.exact_);
      if (out.exact_) out.value_ = out.exact_->to_double();
    }
    return out;
  }

  double value_ = 0.0;
  std::optional<Rational> exact_;
};

}  // namespace nl4s
