#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "errors.hpp"
#include "linalg.hpp"

namespace nct {

/// Uniform periodic grid x_n = -L + n h, h = 2L/M, with dual wavenumbers
/// k_m = (pi/L)(m - M/2), m = 0..M-1.
struct Grid1D {
  int M = 64;
  double L = 8.0;

  double h() const { return 2.0 * L / M; }
  double dk() const { return pi / L; }
  /// Half-length of the dual grid, M pi / (2L).
  double k_half() const { return M * pi / (2.0 * L); }

  Eigen::VectorXd points() const {
    Eigen::VectorXd x(M);
    for (int n = 0; n < M; ++n) x(n) = -L + n * h();
    return x;
  }
  Eigen::VectorXd wavenumbers() const {
    Eigen::VectorXd k(M);
    for (int m = 0; m < M; ++m) k(m) = dk() * (m - M / 2);
    return k;
  }
  void validate() const {
    if (M < 2 || !(L > 0.0) || !std::isfinite(L)) throw rejected_input("grid needs M >= 2 and L > 0");
  }
  /// Grid whose step equals its dual step: L = sqrt(pi M / 2).
  static Grid1D symmetric(int M) { return Grid1D{M, std::sqrt(pi * M / 2.0)}; }
};

enum class Domain { position, frequency };

inline bool is_power_of_two(long long m) { return m >= 1 && (m & (m - 1)) == 0; }

/// Complex samples on the uniform grid of [-L, L)^d, M points per axis,
/// flattened row-major (axis 0 slowest).
///
/// A frequency-domain function uses the same layout: its L is the dual
/// half-length M pi / (2 L_position) and its step is the dual step pi / L_position.
class GridFunction {
 public:
  static constexpr long long max_points = 1LL << 24;

  GridFunction(int d, double L, int M, Domain domain = Domain::position) : d_(d), M_(M), L_(L), domain_(domain) {
    if (d < 1) throw rejected_input("grid function needs d >= 1");
    if (!is_power_of_two(M) || M < 2) throw rejected_input("grid size M must be a power of two >= 2");
    if (!(L > 0.0) || !std::isfinite(L)) throw rejected_input("grid half-length must be positive");
    long long n = 1;
    for (int i = 0; i < d; ++i) {
      n *= M;
      if (n > max_points) throw size_cap_exceeded("grid function", n, max_points);
    }
    v_.assign(static_cast<std::size_t>(n), cplx(0.0));
  }

  template <class F>
  static GridFunction sample(int d, double L, int M, F&& fn, Domain domain = Domain::position) {
    GridFunction g(d, L, M, domain);
    std::vector<double> x(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < g.v_.size(); ++i) {
      g.coordinates(i, x);
      g.v_[i] = fn(std::span<const double>(x));
    }
    return g;
  }

  int dim() const noexcept { return d_; }
  int points_per_axis() const noexcept { return M_; }
  double half_length() const noexcept { return L_; }
  Domain domain() const noexcept { return domain_; }
  double step() const noexcept { return 2.0 * L_ / M_; }
  double dual_half_length() const noexcept { return M_ * pi / (2.0 * L_); }
  Grid1D axis() const { return Grid1D{M_, L_}; }

  std::size_t size() const noexcept { return v_.size(); }
  cplx& operator[](std::size_t i) { return v_[i]; }
  const cplx& operator[](std::size_t i) const { return v_[i]; }
  std::vector<cplx>& values() noexcept { return v_; }
  const std::vector<cplx>& values() const noexcept { return v_; }

  void indices(std::size_t flat, std::vector<int>& idx) const {
    idx.resize(static_cast<std::size_t>(d_));
    for (int a = d_ - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % M_);
      flat /= M_;
    }
  }
  std::size_t flat(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (int a = 0; a < d_; ++a) f = f * M_ + static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
    return f;
  }
  void coordinates(std::size_t flat_index, std::vector<double>& x) const {
    x.resize(static_cast<std::size_t>(d_));
    for (int a = d_ - 1; a >= 0; --a) {
      x[static_cast<std::size_t>(a)] = -L_ + static_cast<double>(flat_index % M_) * step();
      flat_index /= M_;
    }
  }

  /// Quadrature weight per sample: h^d in position space, (dk / 2 pi)^d in frequency space.
  double cell_weight() const {
    const double w = domain_ == Domain::position ? step() : step() / two_pi;
    return std::pow(w, d_);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& c : v_) m = std::max(m, std::abs(c));
    return m;
  }
  double l2_norm() const {
    double s = 0.0;
    for (const auto& c : v_) s += std::norm(c);
    return std::sqrt(s * cell_weight());
  }
  cplx integral() const {
    cplx s = 0.0;
    for (const auto& c : v_) s += c;
    return s * cell_weight();
  }

  /// Max modulus on the outer shell of the box relative to the global max modulus.
  double boundary_decay() const {
    const double global = max_abs();
    if (global == 0.0) return 0.0;
    double shell = 0.0;
    std::vector<int> idx;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      indices(i, idx);
      if (std::any_of(idx.begin(), idx.end(), [&](int k) { return k == 0 || k == M_ - 1; }))
        shell = std::max(shell, std::abs(v_[i]));
    }
    return shell / global;
  }
  bool boundary_warning() const { return boundary_decay() > 1e-8; }

  bool same_grid(const GridFunction& o) const {
    return d_ == o.d_ && M_ == o.M_ && domain_ == o.domain_ && std::abs(L_ - o.L_) <= 1e-12 * std::max(L_, o.L_);
  }
  void require_same_grid(const GridFunction& o, const char* what) const {
    if (!same_grid(o)) throw rejected_input(std::string(what) + ": grid mismatch");
  }

  double max_abs_difference(const GridFunction& o) const {
    require_same_grid(o, "max_abs_difference");
    double m = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) m = std::max(m, std::abs(v_[i] - o.v_[i]));
    return m;
  }

  GridFunction pointwise_product(const GridFunction& o) const {
    require_same_grid(o, "pointwise_product");
    GridFunction r = *this;
    for (std::size_t i = 0; i < v_.size(); ++i) r.v_[i] *= o.v_[i];
    return r;
  }

 private:
  int d_;
  int M_;
  double L_;
  Domain domain_;
  std::vector<cplx> v_;
};

namespace detail {

/// Applies op to every 1-d line of the array along each axis.
template <class Op>
void for_each_line(std::vector<cplx>& data, int d, int M, Op&& op) {
  std::vector<cplx> line(static_cast<std::size_t>(M)), out;
  std::size_t stride = 1;
  for (int axis = d - 1; axis >= 0; --axis) {
    const std::size_t block = stride * M;
    for (std::size_t base = 0; base < data.size(); base += block)
      for (std::size_t off = 0; off < stride; ++off) {
        for (int i = 0; i < M; ++i) line[static_cast<std::size_t>(i)] = data[base + off + i * stride];
        op(line, out);
        for (int i = 0; i < M; ++i) data[base + off + i * stride] = out[static_cast<std::size_t>(i)];
      }
    stride = block;
  }
}

}  // namespace detail

/// F(k) = int f(x) e^{-i k.x} dx by the rectangle rule, on the centered dual grid.
inline GridFunction fourier_transform(const GridFunction& f) {
  if (f.domain() != Domain::position) throw rejected_input("fourier_transform expects a position-space function");
  const int M = f.points_per_axis();
  GridFunction out(f.dim(), f.dual_half_length(), M, Domain::frequency);
  out.values() = f.values();
  Eigen::FFT<double> fft;
  const double h = f.step();
  detail::for_each_line(out.values(), f.dim(), M, [&](std::vector<cplx>& line, std::vector<cplx>& res) {
    for (int n = 0; n < M; ++n)
      if (n % 2) line[static_cast<std::size_t>(n)] = -line[static_cast<std::size_t>(n)];
    fft.fwd(res, line);
    for (int m = 0; m < M; ++m) {
      const int parity = (m - M / 2) % 2 == 0 ? 1 : -1;
      res[static_cast<std::size_t>(m)] *= h * parity;
    }
  });
  return out;
}

/// Inverse of fourier_transform: f(x) = (2 pi)^{-d} sum_k F(k) e^{i k.x} dk^d.
inline GridFunction inverse_fourier_transform(const GridFunction& F) {
  if (F.domain() != Domain::frequency) throw rejected_input("inverse_fourier_transform expects a frequency-space function");
  const int M = F.points_per_axis();
  GridFunction out(F.dim(), F.dual_half_length(), M, Domain::position);
  out.values() = F.values();
  Eigen::FFT<double> fft;
  const double h = out.step();
  detail::for_each_line(out.values(), F.dim(), M, [&](std::vector<cplx>& line, std::vector<cplx>& res) {
    for (int m = 0; m < M; ++m)
      if ((m - M / 2) % 2) line[static_cast<std::size_t>(m)] = -line[static_cast<std::size_t>(m)];
    fft.inv(res, line);
    for (int n = 0; n < M; ++n) res[static_cast<std::size_t>(n)] *= (n % 2 ? -1.0 : 1.0) / h;
  });
  return out;
}

}  // namespace nct
