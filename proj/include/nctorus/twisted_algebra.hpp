#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "rational.hpp"
#include "skew_matrix.hpp"

namespace nct {

/// Exponent vector m in Z^d labelling the monomial u^m.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<std::int64_t> e) : e_(std::move(e)) {}
  MultiIndex(std::initializer_list<std::int64_t> e) : e_(e) {}

  static MultiIndex zero(int d) { return MultiIndex(std::vector<std::int64_t>(static_cast<std::size_t>(d), 0)); }
  static MultiIndex unit(int d, int j) {
    MultiIndex m = zero(d);
    m.e_.at(static_cast<std::size_t>(j)) = 1;
    return m;
  }

  int size() const noexcept { return static_cast<int>(e_.size()); }
  std::int64_t operator[](int j) const { return e_[static_cast<std::size_t>(j)]; }
  std::int64_t& operator[](int j) { return e_[static_cast<std::size_t>(j)]; }
  const std::vector<std::int64_t>& values() const noexcept { return e_; }
  bool is_zero() const {
    for (auto v : e_)
      if (v != 0) return false;
    return true;
  }
  std::int64_t linf() const {
    std::int64_t r = 0;
    for (auto v : e_) r = std::max(r, v < 0 ? -v : v);
    return r;
  }

  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    check_same(a, b);
    MultiIndex r = a;
    for (std::size_t i = 0; i < a.e_.size(); ++i)
      if (__builtin_add_overflow(a.e_[i], b.e_[i], &r.e_[i])) throw rejected_input("exponent overflow");
    return r;
  }
  MultiIndex operator-() const {
    MultiIndex r = *this;
    for (auto& v : r.e_) {
      if (v == INT64_MIN) throw rejected_input("exponent overflow");
      v = -v;
    }
    return r;
  }
  friend MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) { return a + (-b); }
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < e_.size(); ++i) s += (i ? "," : "") + std::to_string(e_[i]);
    return s + ")";
  }

 private:
  static void check_same(const MultiIndex& a, const MultiIndex& b) {
    if (a.e_.size() != b.e_.size()) throw rejected_input("multi-index length mismatch");
  }
  std::vector<std::int64_t> e_;
};

/// Real number c standing for the phase e^{2 pi i c}, kept modulo 1.
///
/// Carries an exact rational representative whenever it was produced from
/// rational data, so equality modulo 1 can be decided without rounding.
class PhaseExponent {
 public:
  PhaseExponent() : value_(0.0), exact_(Rational(0)) {}
  explicit PhaseExponent(const Rational& r) : value_(r.frac().to_double()), exact_(r.frac()) {}
  explicit PhaseExponent(double v) : value_(v - std::floor(v)) {}

  double value() const noexcept { return value_; }
  const std::optional<Rational>& exact() const noexcept { return exact_; }
  bool is_exact() const noexcept { return exact_.has_value(); }
  cplx phase() const { return unit_phase(value_); }

  /// Distance from the exponent to the nearest integer.
  double distance_to_integer() const {
    if (exact_) {
      const Rational c = exact_->centered();
      return std::abs(c.to_double());
    }
    return std::abs(value_ - std::round(value_));
  }
  bool is_integer() const { return exact_ ? exact_->is_zero() : distance_to_integer() == 0.0; }

  friend PhaseExponent operator+(const PhaseExponent& a, const PhaseExponent& b) {
    if (a.exact_ && b.exact_) return PhaseExponent(*a.exact_ + *b.exact_);
    return PhaseExponent(a.value_ + b.value_);
  }
  PhaseExponent operator-() const { return exact_ ? PhaseExponent(-*exact_) : PhaseExponent(-value_); }
  friend PhaseExponent operator-(const PhaseExponent& a, const PhaseExponent& b) { return a + (-b); }

 private:
  double value_;
  std::optional<Rational> exact_;
};

/// Structure phase c(m, m') = -sum_{j<k} theta_jk m_k m'_j, so that
/// u^m u^{m'} = e^{2 pi i c(m, m')} u^{m + m'}.
inline PhaseExponent structure_phase(const MultiIndex& m, const MultiIndex& mp, const SkewMatrix& theta) {
  const int d = theta.dim();
  if (m.size() != d || mp.size() != d) throw rejected_input("multi-index length does not match theta dimension");
  if (theta.is_rational()) {
    Rational acc(0);
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k) {
        const std::int64_t prod = m[k] * mp[j];
        if (prod != 0 && !theta.exact(j, k).is_zero()) acc = (acc - theta.exact(j, k) * Rational(prod)).frac();
      }
    return PhaseExponent(acc);
  }
  double acc = 0.0;
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) acc -= theta(j, k) * static_cast<double>(m[k]) * static_cast<double>(mp[j]);
  return PhaseExponent(acc);
}

/// Gaussian integer a + b i.
struct GaussInt {
  std::int64_t re = 0;
  std::int64_t im = 0;
  friend GaussInt operator+(GaussInt a, GaussInt b) { return {a.re + b.re, a.im + b.im}; }
  friend GaussInt operator*(GaussInt a, GaussInt b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
  GaussInt conj() const { return {re, -im}; }
  bool is_zero() const { return re == 0 && im == 0; }
  friend bool operator==(GaussInt, GaussInt) = default;
};

/// Element of the group ring Z[i][Q/Z]: a finite sum of Gaussian integers
/// attached to rational phases e^{2 pi i r}.
///
/// Arithmetic is formal and exact. Two values that compare equal represent the
/// same complex number; the converse can fail through cyclotomic relations,
/// which never arise when both sides come from the same monomial expansion.
class CyclotomicCoeff {
 public:
  CyclotomicCoeff() = default;
  CyclotomicCoeff(GaussInt c, const Rational& r = Rational(0)) {
    if (!c.is_zero()) terms_[r.frac()] = c;
  }
  static CyclotomicCoeff integer(std::int64_t re, std::int64_t im = 0) { return CyclotomicCoeff(GaussInt{re, im}); }

  const std::map<Rational, GaussInt>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  friend CyclotomicCoeff operator+(const CyclotomicCoeff& a, const CyclotomicCoeff& b) {
    CyclotomicCoeff r = a;
    for (const auto& [k, v] : b.terms_) r.accumulate(k, v);
    return r;
  }
  friend CyclotomicCoeff operator*(const CyclotomicCoeff& a, const CyclotomicCoeff& b) {
    CyclotomicCoeff r;
    for (const auto& [ka, va] : a.terms_)
      for (const auto& [kb, vb] : b.terms_) r.accumulate((ka + kb).frac(), va * vb);
    return r;
  }
  CyclotomicCoeff rotated(const Rational& phase) const {
    CyclotomicCoeff r;
    for (const auto& [k, v] : terms_) r.terms_[(k + phase).frac()] = v;
    return r;
  }
  CyclotomicCoeff conj() const {
    CyclotomicCoeff r;
    for (const auto& [k, v] : terms_) r.terms_[(-k).frac()] = v.conj();
    return r;
  }
  cplx to_complex() const {
    cplx acc = 0.0;
    for (const auto& [k, v] : terms_)
      acc += cplx(static_cast<double>(v.re), static_cast<double>(v.im)) * unit_phase(k.to_double());
    return acc;
  }
  friend bool operator==(const CyclotomicCoeff&, const CyclotomicCoeff&) = default;

 private:
  void accumulate(const Rational& k, GaussInt v) {
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      if (!v.is_zero()) terms_.emplace(k, v);
      return;
    }
    it->second = it->second + v;
    if (it->second.is_zero()) terms_.erase(it);
  }
  std::map<Rational, GaussInt> terms_;
};

/// Operations a coefficient ring must provide to the polynomial algebra.
template <class C>
struct CoeffTraits;

template <>
struct CoeffTraits<cplx> {
  static constexpr bool exact = false;
  static cplx zero() { return 0.0; }
  static cplx one() { return 1.0; }
  static bool is_zero(const cplx& c) { return std::abs(c) < 1e-15; }
  static cplx rotate(const cplx& c, const PhaseExponent& e) { return c * e.phase(); }
  static cplx conj(const cplx& c) { return std::conj(c); }
  static cplx to_complex(const cplx& c) { return c; }
};

template <>
struct CoeffTraits<CyclotomicCoeff> {
  static constexpr bool exact = true;
  static CyclotomicCoeff zero() { return {}; }
  static CyclotomicCoeff one() { return CyclotomicCoeff::integer(1); }
  static bool is_zero(const CyclotomicCoeff& c) { return c.is_zero(); }
  static CyclotomicCoeff rotate(const CyclotomicCoeff& c, const PhaseExponent& e) {
    if (!e.is_exact()) throw rejected_input("exact coefficients require a rational phase");
    return c.rotated(*e.exact());
  }
  static CyclotomicCoeff conj(const CyclotomicCoeff& c) { return c.conj(); }
  static cplx to_complex(const CyclotomicCoeff& c) { return c.to_complex(); }
};

/// Finite sum of monomials alpha_m u^m in the algebra with relations
/// u_j u_k = e^{2 pi i theta_jk} u_k u_j.
///
/// Zero terms are never stored; complex coefficients below 1e-15 in modulus
/// count as zero. The term map is
/// ordered lexicographically by exponent, which fixes iteration order.
template <class Coeff>
class BasicPolynomial {
 public:
  using coeff_type = Coeff;
  using traits = CoeffTraits<Coeff>;

  explicit BasicPolynomial(SkewMatrix theta) : theta_(std::move(theta)) {
    if (traits::exact && !theta_.is_rational())
      throw rejected_input("exact coefficients require a rational theta");
  }

  static BasicPolynomial monomial(const SkewMatrix& theta, const MultiIndex& m, const Coeff& c = traits::one()) {
    BasicPolynomial p(theta);
    p.add_term(m, c);
    return p;
  }
  static BasicPolynomial unit(const SkewMatrix& theta) { return monomial(theta, MultiIndex::zero(theta.dim())); }
  static BasicPolynomial generator(const SkewMatrix& theta, int j) {
    if (j < 0 || j >= theta.dim()) throw rejected_input("generator index out of range");
    return monomial(theta, MultiIndex::unit(theta.dim(), j));
  }

  const SkewMatrix& theta() const noexcept { return theta_; }
  int dim() const noexcept { return theta_.dim(); }
  const std::map<MultiIndex, Coeff>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }

  void add_term(const MultiIndex& m, const Coeff& c) {
    if (m.size() != dim()) throw rejected_input("monomial exponent length does not match theta dimension");
    if (traits::is_zero(c)) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
      return;
    }
    it->second = it->second + c;
    if (traits::is_zero(it->second)) terms_.erase(it);
  }

  Coeff coeff(const MultiIndex& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? traits::zero() : it->second;
  }

  friend BasicPolynomial operator+(const BasicPolynomial& a, const BasicPolynomial& b) {
    check_compatible(a, b);
    BasicPolynomial r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
  }

  friend bool operator==(const BasicPolynomial& a, const BasicPolynomial& b) {
    return a.theta_ == b.theta_ && a.terms_ == b.terms_;
  }

  static void check_compatible(const BasicPolynomial& a, const BasicPolynomial& b) {
    if (a.dim() != b.dim()) throw rejected_input("polynomials live in algebras of different dimension");
    if (!(a.theta_ == b.theta_)) throw rejected_input("polynomials have different theta");
  }

 private:
  SkewMatrix theta_;
  std::map<MultiIndex, Coeff> terms_;
};

using NCPolynomial = BasicPolynomial<cplx>;
using ExactPolynomial = BasicPolynomial<CyclotomicCoeff>;

template <class C>
BasicPolynomial<C> poly_mul(const BasicPolynomial<C>& a, const BasicPolynomial<C>& b) {
  BasicPolynomial<C>::check_compatible(a, b);
  using T = CoeffTraits<C>;
  BasicPolynomial<C> r(a.theta());
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms())
      r.add_term(ma + mb, T::rotate(ca * cb, structure_phase(ma, mb, a.theta())));
  return r;
}

template <class C>
BasicPolynomial<C> operator*(const BasicPolynomial<C>& a, const BasicPolynomial<C>& b) {
  return poly_mul(a, b);
}

/// Involution: (alpha u^m)^* = conj(alpha) e^{-2 pi i c(m,-m)} u^{-m}.
template <class C>
BasicPolynomial<C> poly_adjoint(const BasicPolynomial<C>& a) {
  using T = CoeffTraits<C>;
  BasicPolynomial<C> r(a.theta());
  for (const auto& [m, c] : a.terms()) r.add_term(-m, T::rotate(T::conj(c), -structure_phase(m, -m, a.theta())));
  return r;
}

/// Canonical trace: the coefficient of u^0.
template <class C>
C trace(const BasicPolynomial<C>& a) {
  return a.coeff(MultiIndex::zero(a.dim()));
}

/// Conditional expectation onto the subalgebra without u_j; j is 0-based.
template <class C>
BasicPolynomial<C> cond_expectation(const BasicPolynomial<C>& a, int j) {
  if (j < 0 || j >= a.dim()) throw rejected_input("conditional expectation axis out of range");
  BasicPolynomial<C> r(a.theta());
  for (const auto& [m, c] : a.terms())
    if (m[j] == 0) r.add_term(m, c);
  return r;
}

/// Gauge action u^m -> z^m u^m with each z_j = e^{2 pi i r_j} a root of unity.
template <class C>
BasicPolynomial<C> transference(const BasicPolynomial<C>& a, const std::vector<Rational>& z_exponents) {
  if (static_cast<int>(z_exponents.size()) != a.dim()) throw rejected_input("transference needs one phase per generator");
  using T = CoeffTraits<C>;
  BasicPolynomial<C> r(a.theta());
  for (const auto& [m, c] : a.terms()) {
    Rational e(0);
    for (int j = 0; j < a.dim(); ++j) e = (e + z_exponents[static_cast<std::size_t>(j)] * Rational(m[j])).frac();
    r.add_term(m, T::rotate(c, PhaseExponent(e)));
  }
  return r;
}

/// Gauge action u^m -> z^m u^m for arbitrary points z on the torus.
inline NCPolynomial transference(const NCPolynomial& a, const std::vector<cplx>& z) {
  if (static_cast<int>(z.size()) != a.dim()) throw rejected_input("transference needs one phase per generator");
  for (const auto& zj : z)
    if (std::abs(std::abs(zj) - 1.0) > 1e-12) throw rejected_input("transference points must have modulus one");
  NCPolynomial r(a.theta());
  for (const auto& [m, c] : a.terms()) {
    cplx f = 1.0;
    for (int j = 0; j < a.dim(); ++j) f *= std::pow(z[static_cast<std::size_t>(j)], static_cast<double>(m[j]));
    r.add_term(m, c * f);
  }
  return r;
}

template <class C>
NCPolynomial to_complex(const BasicPolynomial<C>& a) {
  NCPolynomial r(a.theta());
  for (const auto& [m, c] : a.terms()) r.add_term(m, CoeffTraits<C>::to_complex(c));
  return r;
}

/// Largest coefficient difference between two polynomials over the same theta.
template <class C>
double max_coeff_difference(const BasicPolynomial<C>& a, const BasicPolynomial<C>& b) {
  BasicPolynomial<C>::check_compatible(a, b);
  const NCPolynomial ca = to_complex(a), cb = to_complex(b);
  double r = 0.0;
  for (const auto& [m, c] : ca.terms()) r = std::max(r, std::abs(c - cb.coeff(m)));
  for (const auto& [m, c] : cb.terms()) r = std::max(r, std::abs(c - ca.coeff(m)));
  return r;
}

/// Row-major position of m inside the box [-N, N]^d, or -1 when outside.
inline long long gns_box_index(const MultiIndex& m, int N) {
  long long idx = 0;
  const long long side = 2LL * N + 1;
  for (int j = 0; j < m.size(); ++j) {
    if (m[j] < -N || m[j] > N) return -1;
    idx = idx * side + (m[j] + N);
  }
  return idx;
}

inline MultiIndex gns_box_point(long long idx, int d, int N) {
  const long long side = 2LL * N + 1;
  MultiIndex m = MultiIndex::zero(d);
  for (int j = d - 1; j >= 0; --j) {
    m[j] = idx % side - N;
    idx /= side;
  }
  return m;
}

/// Truncated matrix of the GNS action pi(u^m)|m'> = e^{2 pi i c(m,m')} |m+m'>
/// on the basis vectors |m'> with |m'|_inf <= N, ordered row-major.
template <class C>
CMatrix gns_matrix(const BasicPolynomial<C>& a, int N, long long size_cap = 1 << 14) {
  if (N < 0) throw rejected_input("GNS truncation must be non-negative");
  const int d = a.dim();
  long long n = 1;
  for (int j = 0; j < d; ++j) {
    n *= 2LL * N + 1;
    if (n > size_cap) throw size_cap_exceeded("GNS matrix", n, size_cap);
  }
  const NCPolynomial p = to_complex(a);
  CMatrix out = CMatrix::Zero(n, n);
  for (long long col = 0; col < n; ++col) {
    const MultiIndex mp = gns_box_point(col, d, N);
    for (const auto& [m, c] : p.terms()) {
      const long long row = gns_box_index(m + mp, N);
      if (row >= 0) out(row, col) += c * structure_phase(m, mp, a.theta()).phase();
    }
  }
  return out;
}

struct CocycleReport {
  /// Largest distance to an integer of c(a,b) + c(a+b,c) - c(b,c) - c(a,b+c).
  double max_associativity_deviation = 0.0;
  /// Largest distance to an integer of c(0,m) and c(m,0).
  double max_normalization_deviation = 0.0;
  /// True when every deviation was decided in exact arithmetic.
  bool exact = true;
  std::size_t samples = 0;
};

inline CocycleReport cocycle_validate(const SkewMatrix& theta, const std::vector<std::array<MultiIndex, 3>>& samples) {
  CocycleReport rep;
  const MultiIndex zero = MultiIndex::zero(theta.dim());
  for (const auto& [a, b, c] : samples) {
    const PhaseExponent lhs = structure_phase(a, b, theta) + structure_phase(a + b, c, theta);
    const PhaseExponent rhs = structure_phase(b, c, theta) + structure_phase(a, b + c, theta);
    const PhaseExponent diff = lhs - rhs;
    rep.exact = rep.exact && diff.is_exact();
    rep.max_associativity_deviation = std::max(rep.max_associativity_deviation, diff.distance_to_integer());
    for (const MultiIndex* m : {&a, &b, &c}) {
      rep.max_normalization_deviation =
          std::max({rep.max_normalization_deviation, structure_phase(zero, *m, theta).distance_to_integer(),
                    structure_phase(*m, zero, theta).distance_to_integer()});
    }
    ++rep.samples;
  }
  return rep;
}

}  // namespace nct
