#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "rational.hpp"

namespace nct {

/// (u(s) f)(x) = f(x + s), acting as e^{i k s} on the discrete Fourier modes.
inline CMatrix translation_unitary(double s, const Grid1D& g) {
  g.validate();
  const int M = g.M;
  const Eigen::VectorXd k = g.wavenumbers();
  CMatrix u(M, M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) {
      cplx acc = 0.0;
      const double off = (a - b) * g.h() + s;
      for (int m = 0; m < M; ++m) acc += std::polar(1.0, k(m) * off);
      u(a, b) = acc / static_cast<double>(M);
    }
  return u;
}

/// (v(t) f)(x) = e^{i x t} f(x).
inline CMatrix modulation_unitary(double t, const Grid1D& g) {
  g.validate();
  const Eigen::VectorXd x = g.points();
  CVector d(g.M);
  for (int n = 0; n < g.M; ++n) d(n) = std::polar(1.0, x(n) * t);
  return d.asDiagonal();
}

struct WeylResidualReport {
  /// max over wave-packet test states psi of ||R psi|| / ||psi||,
  /// R = u(theta s) v(t) - e^{i s t theta} v(t) u(theta s)
  double residual = 0.0;
  /// ||R|| over the whole grid space
  double operator_residual = 0.0;
  /// theta s is a multiple of the grid step and t a multiple of the dual step
  bool commensurate = false;
};

namespace detail {

inline bool near_integer(double x) { return std::abs(x - std::round(x)) <= 1e-12 * std::max(1.0, std::abs(x)); }

}  // namespace detail

/// Gaussian wave packet exp(-(x - x0)^2 / 2 + i p0 x), normalized in l2.
inline CVector wave_packet(const Grid1D& g, double x0, double p0, double width = 1.0) {
  const Eigen::VectorXd x = g.points();
  CVector v(g.M);
  for (int n = 0; n < g.M; ++n)
    v(n) = std::exp(-(x(n) - x0) * (x(n) - x0) / (2 * width * width)) * std::polar(1.0, p0 * x(n));
  return v / v.norm();
}

/// Weyl relation u(theta s) v(t) = e^{i s t theta} v(t) u(theta s) on the grid.
///
/// The operator residual stays of order one under refinement because the grid
/// space always contains modes near the Nyquist limit; the headline residual is
/// measured on packets centred at x0 in {-L/4, 0, L/4} and p0 in {-K/4, 0, K/4}
/// (K the dual half-length), which are resolved by every grid in a refinement.
inline WeylResidualReport weyl_residual(double theta, double s, double t, const Grid1D& g) {
  const CMatrix u = translation_unitary(theta * s, g), v = modulation_unitary(t, g);
  const CMatrix r = u * v - std::polar(1.0, s * t * theta) * (v * u);
  WeylResidualReport rep;
  rep.operator_residual = spectral_norm(r);
  rep.commensurate = detail::near_integer(theta * s / g.h()) && detail::near_integer(t / g.dk());
  for (double x0 : {-g.L / 4, 0.0, g.L / 4})
    for (double p0 : {-g.k_half() / 4, 0.0, g.k_half() / 4}) {
      const CVector psi = wave_packet(g, x0, p0);
      rep.residual = std::max(rep.residual, (r * psi).norm());
    }
  return rep;
}

struct RefinementStudy {
  std::vector<int> M;
  std::vector<double> residuals;
  /// log2(r_i / r_{i+1}) per doubling; empty entries where a residual is at the floor.
  std::vector<double> orders;
  /// Each residual is below half its predecessor or below the floor.
  bool decreasing_or_floor = true;
};

inline RefinementStudy weyl_refinement_study(double theta, double s, double t, const std::vector<int>& sizes,
                                             double floor = 1e-13) {
  RefinementStudy st;
  for (int m : sizes) {
    st.M.push_back(m);
    st.residuals.push_back(weyl_residual(theta, s, t, Grid1D::symmetric(m)).residual);
  }
  for (std::size_t i = 1; i < st.residuals.size(); ++i) {
    const double a = st.residuals[i - 1], b = st.residuals[i];
    st.orders.push_back(a > floor && b > 0 ? std::log2(a / b) : 0.0);
    if (!(b <= 0.5 * a || b <= floor)) st.decreasing_or_floor = false;
  }
  return st;
}

/// Two Hermitian matrices of equal size.
class HermitianPair {
 public:
  HermitianPair(CMatrix p, CMatrix p2) : p_(std::move(p)), p2_(std::move(p2)) {
    if (p_.rows() != p_.cols() || p2_.rows() != p2_.cols() || p_.rows() != p2_.rows())
      throw rejected_input("hermitian pair needs square matrices of equal size");
    if (!is_hermitian(p_, 1e-12) || !is_hermitian(p2_, 1e-12)) throw rejected_input("matrices must be Hermitian");
  }
  const CMatrix& first() const noexcept { return p_; }
  const CMatrix& second() const noexcept { return p2_; }
  Eigen::Index size() const noexcept { return p_.rows(); }

 private:
  CMatrix p_, p2_;
};

struct GeneratorBoundReport {
  /// ||P - P'||
  double generator_distance = 0.0;
  /// min over t of ||P - P'|| |t| - ||e^{iPt} - e^{iP't}||
  double necessity_margin = 0.0;
  bool necessity_holds = true;
  std::size_t violations = 0;
  /// sup over sampled small t of ||e^{iPt} - e^{iP't}|| / |t|
  double slope = 0.0;
  double slope_relative_error = 0.0;
  bool slope_within_5_percent = false;
};

/// Checks ||e^{iPt} - e^{iP't}|| <= ||P - P'|| |t| for every t, and that the
/// difference quotient at t <= 0.01 / ||P - P'|| recovers ||P - P'||.
inline GeneratorBoundReport generator_bound_check(const HermitianPair& pair, const std::vector<double>& ts) {
  if (ts.empty()) throw rejected_input("generator_bound_check needs sample times");
  GeneratorBoundReport rep;
  rep.generator_distance = spectral_norm(pair.first() - pair.second());
  Eigen::SelfAdjointEigenSolver<CMatrix> e1(pair.first()), e2(pair.second());
  auto expm = [](const Eigen::SelfAdjointEigenSolver<CMatrix>& es, double t) {
    CVector ph(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::polar(1.0, t * es.eigenvalues()(i));
    return CMatrix(es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint());
  };
  rep.necessity_margin = std::numeric_limits<double>::infinity();
  const double small = rep.generator_distance > 0 ? 0.01 / rep.generator_distance : std::numeric_limits<double>::infinity();
  for (double t : ts) {
    const double lhs = spectral_norm(expm(e1, t) - expm(e2, t));
    const double rhs = rep.generator_distance * std::abs(t);
    const double margin = rhs - lhs;
    rep.necessity_margin = std::min(rep.necessity_margin, margin);
    if (margin < -1e-12 * std::max(1.0, rhs)) ++rep.violations;
    if (t != 0.0 && std::abs(t) <= small) rep.slope = std::max(rep.slope, lhs / std::abs(t));
  }
  rep.necessity_holds = rep.violations == 0;
  if (rep.generator_distance > 0) {
    rep.slope_relative_error = std::abs(rep.slope - rep.generator_distance) / rep.generator_distance;
    rep.slope_within_5_percent = rep.slope_relative_error <= 0.05;
  } else {
    rep.slope_within_5_percent = rep.slope == 0.0;
  }
  return rep;
}

/// Smooth unitary-valued field w(x, y) on the box [-x_extent, x_extent] x [-y_extent, y_extent],
/// sampled on demand with finite-difference step h.
struct UnitaryFieldSample {
  std::function<CMatrix(double, double)> w;
  double x_extent = 1.0;
  double y_extent = 1.0;
  double h = 1e-3;
  /// Size of the values w(x, y).
  Eigen::Index k = 1;

  CMatrix operator()(double x, double y) const {
    if (std::abs(x) > x_extent || std::abs(y) > y_extent)
      throw rejected_input("unitary field evaluated outside its sampling box");
    return w(x, y);
  }
  CMatrix dx(double x, double y) const { return ((*this)(x + h, y) - (*this)(x - h, y)) / (2 * h); }
  CMatrix dy(double x, double y) const { return ((*this)(x, y + h) - (*this)(x, y - h)) / (2 * h); }
};

struct AssembleWReport {
  /// max over points and 2 <= j <= d of the gap between both sides of
  /// dw_j/dx_j - i sum_{k<j} delta_kj x_k w_j
  ///   = sum_{k<j} delta_kj w(x_1, delta_1j x_j) ... (dw/dy - i x_k w)(x_k, delta_kj x_j) ... w(x_{j-1}, delta_{j-1,j} x_j)
  double identity_deviation = 0.0;
  /// max over j < k of | ||dw_k/dx_j|| - |...| ||dw/dx(x_j, delta_jk x_k)|| |
  double chain_rule_deviation = 0.0;
  /// min over points and j of the slack in
  /// ||dW/dx_j - i sum_{k<j} delta_kj x_k W|| <= ||dw_j/dx_j - i sum delta_kj x_k w_j|| + sum_{k>j} ||dw_k/dx_j||
  double assembly_slack = 0.0;
  bool assembly_holds = true;
  /// max over points of ||W^* W - I||
  double unitarity_residual = 0.0;
  /// max over points and j of ||dW/dx_j - i sum_{k<j} delta_kj x_k W||
  double max_assembled_derivative = 0.0;
};

/// W = w_2 w_3 ... w_d with w_j(x) = w(x_1, delta_1j x_j) ... w(x_{j-1}, delta_{j-1,j} x_j);
/// derivatives in x are central differences with the field's step h. Indices are 0-based.
inline AssembleWReport assemble_W(const UnitaryFieldSample& w, const Eigen::MatrixXd& delta, int d,
                                  const std::vector<std::vector<double>>& points) {
  if (d < 2) throw rejected_input("assemble_W needs d >= 2");
  if (delta.rows() < d || delta.cols() < d) throw rejected_input("delta must be d x d");
  const double h = w.h;
  for (const auto& x : points) {
    if (static_cast<int>(x.size()) != d) throw rejected_input("evaluation point has wrong dimension");
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < j; ++k) {
        const double xa = std::abs(x[k]) + h, ya = std::abs(delta(k, j)) * (std::abs(x[j]) + h) + h;
        if (xa > w.x_extent || ya > w.y_extent) throw rejected_input("sampling box does not cover the composed arguments");
      }
  }
  const Eigen::Index n = w.k;
  const CMatrix id = CMatrix::Identity(n, n);
  auto small_w = [&](int j, const std::vector<double>& x) {
    CMatrix acc = id;
    for (int k = 0; k < j; ++k) acc = acc * w(x[k], delta(k, j) * x[j]);
    return acc;
  };
  auto big_w = [&](const std::vector<double>& x) {
    CMatrix acc = id;
    for (int j = 1; j < d; ++j) acc = acc * small_w(j, x);
    return acc;
  };
  auto shifted = [&](std::vector<double> x, int j, double s) {
    x[j] += s;
    return x;
  };
  auto grad_small = [&](int l, int j, const std::vector<double>& x) {
    return CMatrix((small_w(l, shifted(x, j, h)) - small_w(l, shifted(x, j, -h))) / (2 * h));
  };
  AssembleWReport rep;
  rep.assembly_slack = std::numeric_limits<double>::infinity();
  for (const auto& x : points) {
    const CMatrix W = big_w(x);
    rep.unitarity_residual = std::max(rep.unitarity_residual, spectral_norm(W.adjoint() * W - id));
    for (int j = 0; j < d; ++j) {
      double shift = 0.0;
      for (int k = 0; k < j; ++k) shift += delta(k, j) * x[k];
      double lhs_norm = 0.0;
      if (j >= 1) {
        const CMatrix wj = small_w(j, x);
        const CMatrix lhs = grad_small(j, j, x) - cplx(0, 1) * shift * wj;
        CMatrix rhs = CMatrix::Zero(n, n);
        for (int k = 0; k < j; ++k) {
          CMatrix term = id;
          for (int l = 0; l < j; ++l) {
            const double y = delta(l, j) * x[j];
            term = term * (l == k ? CMatrix(w.dy(x[l], y) - cplx(0, 1) * x[l] * w(x[l], y)) : w(x[l], y));
          }
          rhs += delta(k, j) * term;
        }
        rep.identity_deviation = std::max(rep.identity_deviation, spectral_norm(lhs - rhs));
        lhs_norm = spectral_norm(lhs);
      }
      double tail = 0.0;
      for (int l = j + 1; l < d; ++l) {
        const double g = spectral_norm(grad_small(l, j, x));
        tail += g;
        const double chain = spectral_norm(w.dx(x[j], delta(j, l) * x[l]));
        rep.chain_rule_deviation = std::max(rep.chain_rule_deviation, std::abs(g - chain));
      }
      const CMatrix dW = (big_w(shifted(x, j, h)) - big_w(shifted(x, j, -h))) / (2 * h);
      const double total = spectral_norm(dW - cplx(0, 1) * shift * W);
      rep.max_assembled_derivative = std::max(rep.max_assembled_derivative, total);
      const double slack = lhs_norm + tail - total;
      rep.assembly_slack = std::min(rep.assembly_slack, slack);
      if (slack < -1e-6 * std::max(1.0, total)) rep.assembly_holds = false;
    }
  }
  return rep;
}

/// Grid Gamma_n = { j / k^n : |j| <= (n + 1) k^n }, enumerated lazily in increasing order.
class GammaLevel {
 public:
  GammaLevel(std::int64_t k, int n) : k_(k), n_(n) {
    if (k < 1 || n < 0) throw rejected_input("Gamma_n needs k >= 1 and n >= 0");
    __int128 p = 1;
    for (int i = 0; i < n; ++i) {
      p *= k;
      if (p > (static_cast<__int128>(1) << 60)) throw rejected_input("Gamma_n denominator overflows");
    }
    den_ = static_cast<std::int64_t>(p);
    bound_ = static_cast<std::int64_t>(n + 1) * den_;
  }

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Rational;
    using difference_type = std::ptrdiff_t;
    using pointer = void;
    using reference = Rational;
    iterator(std::int64_t j, std::int64_t den) : j_(j), den_(den) {}
    Rational operator*() const { return Rational(j_, den_); }
    iterator& operator++() {
      ++j_;
      return *this;
    }
    iterator operator++(int) {
      iterator t = *this;
      ++j_;
      return t;
    }
    bool operator==(const iterator& o) const { return j_ == o.j_; }

   private:
    std::int64_t j_, den_;
  };

  iterator begin() const { return iterator(-bound_, den_); }
  iterator end() const { return iterator(bound_ + 1, den_); }
  std::int64_t count() const { return 2 * bound_ + 1; }
  std::int64_t denominator() const { return den_; }
  Rational spacing() const { return Rational(1, den_); }

 private:
  std::int64_t k_;
  int n_;
  std::int64_t den_ = 1;
  std::int64_t bound_ = 0;
};

struct AuditReport {
  std::int64_t k = 0;
  double target = 0.0;
  /// 1224 + target * 45 / sqrt(k)
  double step_value = 0.0;
  /// Exact value of step_value as a fraction when sqrt(k) and target are integers.
  std::optional<Rational> step_exact;
  double slack = 0.0;
  bool holds = false;
  /// Normalized constants C_n along the interior chain C_0 = target, C_{n+1} = 1224 + 45 C_n / sqrt(k).
  std::vector<double> interior_levels;
  /// Same map started from the unit-interval bound 9.
  std::vector<double> unit_levels;
  bool levels_hold = false;
  /// 1224 / (1 - 45 / sqrt(k)) when 45 < sqrt(k), otherwise infinity.
  double fixed_point = 0.0;
};

/// Bookkeeping of the interpolation recursion: a neighbour bound C k^{-n/2} at
/// spacing k^{-n} becomes (1224 + 45 C / sqrt(k)) k^{-(n+1)/2} after one k-division.
inline AuditReport audit_interpolation_constants(std::int64_t k, double target, int levels = 6) {
  if (k < 1) throw rejected_input("audit needs k >= 1");
  if (levels < 1) throw rejected_input("audit needs at least one level");
  AuditReport rep;
  rep.k = k;
  rep.target = target;
  const std::int64_t r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(k))));
  const bool square = r * r == k;
  const double sk = square ? static_cast<double>(r) : std::sqrt(static_cast<double>(k));
  if (square && target == std::floor(target) && std::abs(target) < 1e15) {
    rep.step_exact = Rational(1224) + Rational(45 * static_cast<std::int64_t>(target), r);
    rep.step_value = rep.step_exact->to_double();
    rep.slack = (Rational(static_cast<std::int64_t>(target)) - *rep.step_exact).to_double();
  } else {
    rep.step_value = 1224.0 + target * 45.0 / sk;
    rep.slack = target - rep.step_value;
  }
  rep.holds = rep.slack >= 0.0;
  auto next = [&](double c) { return 1224.0 + 45.0 * c / sk; };
  double ci = target, cu = 9.0;
  rep.levels_hold = true;
  for (int n = 0; n < levels; ++n) {
    ci = next(ci);
    cu = next(cu);
    rep.interior_levels.push_back(ci);
    rep.unit_levels.push_back(cu);
    rep.levels_hold = rep.levels_hold && ci <= target && cu <= target;
  }
  rep.fixed_point = 45.0 < sk ? 1224.0 / (1.0 - 45.0 / sk) : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace nct
