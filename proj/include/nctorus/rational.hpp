#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace nct {

/// Reduced fraction num/den with den > 0, backed by 64-bit integers.
///
/// Intermediate products are formed in 128 bits; a result that does not fit
/// back into 64 bits raises std::overflow_error rather than wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1) { assign(num, den); }

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_zero() const noexcept { return num_ == 0; }
  bool is_integer() const noexcept { return den_ == 1; }

  /// Representative of this value modulo 1 in [0, 1).
  Rational frac() const {
    std::int64_t r = num_ % den_;
    if (r < 0) r += den_;
    return Rational(r, den_);
  }

  /// Representative modulo 1 in (-1/2, 1/2].
  Rational centered() const {
    Rational f = frac();
    if (2 * static_cast<__int128>(f.num_) > f.den_) return Rational(f.num_ - f.den_, f.den_);
    return f;
  }

  Rational operator-() const { return Rational(-num_, den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    const std::int64_t g = std::gcd(a.den_, b.den_);
    const __int128 n = static_cast<__int128>(a.num_) * (b.den_ / g) +
                       static_cast<__int128>(b.num_) * (a.den_ / g);
    const __int128 d = static_cast<__int128>(a.den_ / g) * b.den_;
    return from_wide(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    const std::int64_t g1 = std::gcd(a.num_, b.den_);
    const std::int64_t g2 = std::gcd(b.num_, a.den_);
    const __int128 n = static_cast<__int128>(a.num_ / (g1 ? g1 : 1)) * (b.num_ / (g2 ? g2 : 1));
    const __int128 d = static_cast<__int128>(a.den_ / (g2 ? g2 : 1)) * (b.den_ / (g1 ? g1 : 1));
    return from_wide(n, d);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw rejected_input("rational division by zero");
    return a * Rational(b.den_, b.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 l = static_cast<__int128>(a.num_) * b.den_;
    const __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l <=> r;
  }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Parses "p/q", "p" or "-p/q". Whitespace is not accepted.
  static Rational parse(std::string_view s) {
    auto parse_int = [&](std::string_view part) {
      if (part.empty()) throw rejected_input("malformed rational '" + std::string(s) + "'");
      std::size_t pos = 0;
      long long v = 0;
      try {
        v = std::stoll(std::string(part), &pos);
      } catch (const std::exception&) {
        throw rejected_input("malformed rational '" + std::string(s) + "'");
      }
      if (pos != part.size()) throw rejected_input("malformed rational '" + std::string(s) + "'");
      return static_cast<std::int64_t>(v);
    };
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(s), 1);
    const std::int64_t d = parse_int(s.substr(slash + 1));
    if (d == 0) throw rejected_input("rational with zero denominator '" + std::string(s) + "'");
    return Rational(parse_int(s.substr(0, slash)), d);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  void assign(std::int64_t n, std::int64_t d) {
    if (d == 0) throw rejected_input("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const std::int64_t g = std::gcd(n, d);
    num_ = n / g;
    den_ = d / g;
  }

  static Rational from_wide(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    constexpr __int128 lim = static_cast<__int128>(INT64_MAX);
    if (n > lim || n < -lim || d > lim) throw std::overflow_error("rational arithmetic overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace nct
