#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "skew_matrix.hpp"

namespace nct {

namespace detail {

inline void check_theta_dim(const GridFunction& f, const SkewMatrix& theta) {
  if (theta.dim() != f.dim()) throw rejected_input("theta dimension does not match grid dimension");
}

/// Index of the frequency t - s on a centered grid, or -1 when it leaves the grid.
inline int difference_index(int t, int s, int M) {
  const int r = t - s + M / 2;
  return (r < 0 || r >= M) ? -1 : r;
}

}  // namespace detail

/// (F *_theta G)(t) = (2 pi)^{-d} sum_s F(s) G(t - s) e^{(i/2) theta(s, t - s)} dk^d
/// on a centered frequency grid. Samples of G outside the grid count as zero.
inline GridFunction twisted_convolve(const GridFunction& F, const GridFunction& G, const SkewMatrix& theta, int jobs = 1) {
  F.require_same_grid(G, "twisted_convolve");
  if (F.domain() != Domain::frequency) throw rejected_input("twisted_convolve expects frequency-space functions");
  detail::check_theta_dim(F, theta);
  const int d = F.dim(), M = F.points_per_axis();
  const double dk = F.step(), w = F.cell_weight();
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < F.size(); ++i)
    if (F[i] != cplx(0.0)) support.push_back(i);
  std::vector<std::vector<int>> sidx(support.size());
  for (std::size_t a = 0; a < support.size(); ++a) F.indices(support[a], sidx[a]);
  const Eigen::MatrixXd& th = theta.matrix();
  GridFunction out(d, F.half_length(), M, Domain::frequency);
  parallel_for(F.size(), jobs, [&](std::size_t ti) {
    std::vector<int> tidx, ridx(static_cast<std::size_t>(d));
    F.indices(ti, tidx);
    std::vector<double> tht(static_cast<std::size_t>(d), 0.0);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) tht[j] += th(j, k) * dk * (tidx[k] - M / 2);
    cplx acc = 0.0;
    for (std::size_t a = 0; a < support.size(); ++a) {
      bool inside = true;
      double ph = 0.0;
      for (int j = 0; j < d && inside; ++j) {
        const int r = detail::difference_index(tidx[j], sidx[a][j], M);
        inside = r >= 0;
        ridx[j] = r;
        ph += dk * (sidx[a][j] - M / 2) * tht[j];
      }
      if (!inside) continue;
      const cplx gv = G[G.flat(ridx)];
      if (gv == cplx(0.0)) continue;
      acc += F[support[a]] * gv * std::polar(1.0, 0.5 * ph);
    }
    out[ti] = acc * w;
  });
  return out;
}

/// f *_theta g through the Fourier side: transform, twisted convolution, inverse transform.
inline GridFunction star_fourier(const GridFunction& f, const GridFunction& g, const SkewMatrix& theta, int jobs = 1) {
  f.require_same_grid(g, "star_fourier");
  detail::check_theta_dim(f, theta);
  return inverse_fourier_transform(twisted_convolve(fourier_transform(f), fourier_transform(g), theta, jobs));
}

struct MoyalResult {
  GridFunction product;
  /// Outer-shell modulus of f and g relative to their maxima.
  double boundary_decay = 0.0;
  /// Outer-shell modulus of the transforms of f and g relative to their maxima.
  double spectral_tail = 0.0;
  /// (boundary_decay + spectral_tail) * max|f| * max|g|
  double error_estimate = 0.0;
  /// Largest kernel offset the direct quadrature resolves, pi |theta_12| / (2h).
  /// Inputs should be concentrated within this radius of every output point.
  double resolvable_radius = std::numeric_limits<double>::infinity();
};

/// Oscillatory-integral form of the star product evaluated by the rectangle rule.
///
/// After the substitution u = theta s / 2 the product reads
///   (f * g)(x) = (pi^d |det theta|)^{-1} int int f(x + u) g(x + t) e^{2 i u^T theta^{-1} t} du dt,
/// which for d = 2, theta_12 = a has kernel phase (2/a)(u_2 t_1 - u_1 t_2). Offsets t whose
/// kernel frequency exceeds the grid Nyquist limit are dropped, since they only sample
/// the transform of f beyond the resolved band.
inline MoyalResult moyal_direct(const GridFunction& f, const GridFunction& g, const SkewMatrix& theta,
                                double max_operations = 2e10, int jobs = 1) {
  f.require_same_grid(g, "moyal_direct");
  if (f.domain() != Domain::position) throw rejected_input("moyal_direct expects position-space functions");
  detail::check_theta_dim(f, theta);
  const int d = f.dim(), M = f.points_per_axis();
  if (d > 2) throw rejected_input("moyal_direct is limited to d <= 2; use the Fourier path");

  MoyalResult res{f, 0.0, 0.0, 0.0, std::numeric_limits<double>::infinity()};
  const GridFunction F = fourier_transform(f), G = fourier_transform(g);
  res.boundary_decay = std::max(f.boundary_decay(), g.boundary_decay());
  res.spectral_tail = std::max(F.boundary_decay(), G.boundary_decay());
  res.error_estimate = (res.boundary_decay + res.spectral_tail) * f.max_abs() * g.max_abs();

  if (d == 1 || theta(0, 1) == 0.0) {
    res.product = f.pointwise_product(g);
    return res;
  }
  const double a = theta(0, 1), h = f.step();
  const double c = 2.0 * h * h / a;
  const int lmax = std::min(M - 1, static_cast<int>(std::floor(pi / std::abs(c))));
  res.resolvable_radius = pi * std::abs(a) / (2.0 * h);
  const double ops = static_cast<double>(M) * M * (static_cast<double>(M) * M * (2 * lmax + 1) +
                                                    static_cast<double>(M) * (2 * lmax + 1) * (2 * lmax + 1));
  if (ops > max_operations) throw rejected_input("moyal_direct cost guard exceeded; use the Fourier path");

  const int span = 2 * M - 1;
  std::vector<cplx> e(static_cast<std::size_t>(span) * span);
  for (int p = -(M - 1); p <= M - 1; ++p)
    for (int q = -(M - 1); q <= M - 1; ++q)
      e[static_cast<std::size_t>(p + M - 1) * span + (q + M - 1)] = std::polar(1.0, c * p * q);
  auto E = [&](int p, int q) { return e[static_cast<std::size_t>(p + M - 1) * span + (q + M - 1)]; };
  const auto& fv = f.values();
  const auto& gv = g.values();
  const double scale = std::pow(h, 4) / (pi * pi * a * a);

  parallel_for(static_cast<std::size_t>(M) * M, jobs, [&](std::size_t xi) {
    const int x1 = static_cast<int>(xi / M), x2 = static_cast<int>(xi % M);
    const int z2lo = std::max(0, x2 - lmax), z2hi = std::min(M - 1, x2 + lmax);
    const int z1lo = std::max(0, x1 - lmax), z1hi = std::min(M - 1, x1 + lmax);
    const int nz2 = z2hi - z2lo + 1;
    std::vector<cplx> t1(static_cast<std::size_t>(M) * nz2, cplx(0.0));
    for (int y1 = 0; y1 < M; ++y1) {
      std::vector<cplx> row(static_cast<std::size_t>(nz2));
      for (int z2 = z2lo; z2 <= z2hi; ++z2) row[z2 - z2lo] = std::conj(E(y1 - x1, z2 - x2));
      for (int y2 = 0; y2 < M; ++y2) {
        const cplx fy = fv[static_cast<std::size_t>(y1) * M + y2];
        if (fy == cplx(0.0)) continue;
        cplx* dst = &t1[static_cast<std::size_t>(y2) * nz2];
        for (int z = 0; z < nz2; ++z) dst[z] += fy * row[z];
      }
    }
    cplx acc = 0.0;
    for (int y2 = 0; y2 < M; ++y2) {
      const cplx* src = &t1[static_cast<std::size_t>(y2) * nz2];
      for (int z1 = z1lo; z1 <= z1hi; ++z1) {
        cplx t2 = 0.0;
        const cplx* grow = &gv[static_cast<std::size_t>(z1) * M + z2lo];
        for (int z = 0; z < nz2; ++z) t2 += src[z] * grow[z];
        acc += t2 * E(y2 - x2, z1 - x1);
      }
    }
    res.product[xi] = acc * scale;
  });
  return res;
}

enum class RegularPhase {
  /// e^{(i/2) theta(s, t - s)}, the engine's cocycle.
  half,
  /// e^{i theta(s, t - s)}; equals the half convention at 2 theta.
  full
};

struct RegularRepResult {
  CMatrix matrix;
  double norm_estimate = 0.0;
};

/// Matrix of lambda_theta(f) = sum_s F(s) lambda_theta(s) on the frequency grid:
/// entry [t][r] = w F(t - r) e^{(i/2) theta(t - r, r)}, zero when t - r leaves the grid.
inline RegularRepResult regular_rep_matrix(const GridFunction& f, const SkewMatrix& theta,
                                           RegularPhase phase = RegularPhase::half, long long size_cap = 4096,
                                           bool estimate_norm = true) {
  detail::check_theta_dim(f, theta);
  const long long n = static_cast<long long>(f.size());
  if (n > size_cap) throw size_cap_exceeded("regular representation matrix", n, size_cap);
  const GridFunction F = f.domain() == Domain::position ? fourier_transform(f) : f;
  const int d = F.dim(), M = F.points_per_axis();
  const double dk = F.step(), w = F.cell_weight();
  const double factor = phase == RegularPhase::half ? 0.5 : 1.0;
  RegularRepResult out{CMatrix::Zero(n, n), 0.0};
  std::vector<int> tidx, ridx, sidx(static_cast<std::size_t>(d));
  for (long long t = 0; t < n; ++t) {
    F.indices(static_cast<std::size_t>(t), tidx);
    for (long long r = 0; r < n; ++r) {
      F.indices(static_cast<std::size_t>(r), ridx);
      bool inside = true;
      for (int j = 0; j < d && inside; ++j) {
        sidx[j] = detail::difference_index(tidx[j], ridx[j], M);
        inside = sidx[j] >= 0;
      }
      if (!inside) continue;
      const cplx fs = F[F.flat(sidx)];
      if (fs == cplx(0.0)) continue;
      double ph = 0.0;
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) ph += theta(j, k) * dk * (sidx[j] - M / 2) * dk * (ridx[k] - M / 2);
      out.matrix(t, r) = w * fs * std::polar(1.0, factor * ph);
    }
  }
  if (estimate_norm) out.norm_estimate = spectral_norm(out.matrix);
  return out;
}

/// f^* in the twisted algebra, on the frequency side: F^*(s) = conj(F(-s)).
inline GridFunction twisted_involution(const GridFunction& F) {
  if (F.domain() != Domain::frequency) throw rejected_input("twisted_involution expects a frequency-space function");
  GridFunction out(F.dim(), F.half_length(), F.points_per_axis(), Domain::frequency);
  const int M = F.points_per_axis();
  std::vector<int> idx;
  for (std::size_t i = 0; i < F.size(); ++i) {
    F.indices(i, idx);
    bool inside = true;
    for (auto& k : idx) {
      k = M - k;
      inside = inside && k < M;
    }
    out[i] = inside ? std::conj(F[F.flat(idx)]) : cplx(0.0);
  }
  return out;
}

/// sqrt((2 pi)^{-d} sum_k (1 + |k|^2)^alpha |F(k)|^2 dk^d)
inline double sobolev_norm(const GridFunction& f, double alpha) {
  if (alpha < 0.0) throw rejected_input("sobolev order must be non-negative");
  const GridFunction F = f.domain() == Domain::position ? fourier_transform(f) : f;
  std::vector<double> k;
  double acc = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    F.coordinates(i, k);
    double k2 = 0.0;
    for (double v : k) k2 += v * v;
    acc += std::pow(1.0 + k2, alpha) * std::norm(F[i]);
  }
  return std::sqrt(acc * F.cell_weight());
}

struct QuantizationConstant {
  double alpha = 0.0;
  int d = 0;
  double C = 0.0;
  /// Surface measure of the unit sphere in R^d.
  double sphere_measure = 0.0;
  double value = 0.0;
};

/// C_{alpha,d} = (V_d / (2 alpha - d - 2))^{1/2} C with V_d = 2 pi^{d/2} / Gamma(d/2).
inline QuantizationConstant quantization_constant(double alpha, int d, double C) {
  if (d < 1) throw rejected_input("dimension must be positive");
  if (!(alpha > d / 2.0 + 1.0)) throw domain_error("quantization constant needs alpha > d/2 + 1");
  QuantizationConstant q{alpha, d, C, 2.0 * std::pow(pi, d / 2.0) / std::tgamma(d / 2.0), 0.0};
  q.value = std::sqrt(q.sphere_measure / (2.0 * alpha - d - 2.0)) * C;
  return q;
}

struct DimensionReductionOptions {
  /// Samples of each bump on [-eps_n, eps_n].
  int bump_samples = 64;
  /// Transform of f is zeroed outside |s|_inf <= support_radius; <= 0 keeps the full grid.
  double support_radius = 0.0;
  bool require_nonsingular = true;
  int jobs = 1;
};

struct DimensionReductionReport {
  std::vector<double> eps;
  /// ||v(f) g_n||_2
  std::vector<double> norms;
  /// ||lambda_thetahat(f) g||_2
  double target = 0.0;
  /// ||(v(f) g_n)^ - (lambda_thetahat(f) g)^ phi_n||_2
  std::vector<double> deviations;
  std::vector<double> beta;
  /// beta_n ||phi_n|| ||f||_2 ||g||_2
  std::vector<double> paper_bounds;
  /// beta_n ||phi_n|| (2 pi)^{-(d-1)} ||F||_1 ||g||_2
  std::vector<double> young_bounds;
  /// log2 of the ratio of the last two nonzero deviations.
  double observed_rate = 0.0;
  bool paper_bound_holds = true;
  bool young_bound_holds = true;
};

namespace detail {

inline GridFunction bump_free_twisted(const GridFunction& F, const GridFunction& G, const SkewMatrix& theta_hat,
                                      const std::vector<double>& coupling, double td, int jobs) {
  // twisted convolution with the extra factor exp((i/2) sum_j coupling_j s_j t_d)
  GridFunction Fm = F;
  std::vector<double> s;
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (F[i] == cplx(0.0)) continue;
    F.coordinates(i, s);
    double ph = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) ph += coupling[j] * s[j];
    Fm[i] = F[i] * std::polar(1.0, 0.5 * ph * td);
  }
  return twisted_convolve(Fm, G, theta_hat, jobs);
}

}  // namespace detail

/// Compares ||v(f) g_n|| with ||lambda_thetahat(f) g|| for g_n = g (x) phi_n, phi_n a
/// unit-norm cos^2 bump on [-2^{-n}, 2^{-n}] in the last frequency variable.
inline DimensionReductionReport dimension_reduction_check(const GridFunction& f, const SkewMatrix& theta, int n_steps,
                                                          const std::optional<GridFunction>& g_in = std::nullopt,
                                                          const DimensionReductionOptions& opt = {}) {
  const int d = theta.dim();
  if (d < 2) throw rejected_input("dimension reduction needs d >= 2");
  if (f.dim() != d - 1) throw rejected_input("f must live on R^{d-1}");
  if (n_steps < 1) throw rejected_input("n_steps must be positive");
  if (opt.bump_samples < 4) throw rejected_input("bump needs at least 4 samples");
  if (opt.require_nonsingular) {
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(theta.matrix()).singularValues();
    if (sv(0) == 0.0 || sv(sv.size() - 1) <= 1e-8 * sv(0)) throw rejected_input("theta must be nonsingular");
  }
  const SkewMatrix theta_hat = theta.leading(d - 1);
  std::vector<double> coupling(static_cast<std::size_t>(d - 1));
  for (int j = 0; j < d - 1; ++j) coupling[j] = theta(j, d - 1);

  GridFunction F = f.domain() == Domain::position ? fourier_transform(f) : f;
  if (opt.support_radius > 0.0) {
    std::vector<double> s;
    for (std::size_t i = 0; i < F.size(); ++i) {
      F.coordinates(i, s);
      for (double v : s)
        if (std::abs(v) > opt.support_radius) F[i] = 0.0;
    }
  }
  GridFunction g = g_in ? *g_in
                        : GridFunction::sample(d - 1, f.domain() == Domain::position ? f.half_length()
                                                                                     : f.dual_half_length(),
                                               f.points_per_axis(), [](std::span<const double> x) {
                                                 double r2 = 0.0;
                                                 for (double v : x) r2 += v * v;
                                                 return cplx(std::exp(-r2 / 2.0));
                                               });
  const GridFunction G = g.domain() == Domain::position ? fourier_transform(g) : g;
  F.require_same_grid(G, "dimension_reduction_check");

  double f_l1 = 0.0, smax = 0.0;
  std::vector<double> s;
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (F[i] == cplx(0.0)) continue;
    f_l1 += std::abs(F[i]);
    F.coordinates(i, s);
    double cs = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) cs += coupling[j] * s[j];
    smax = std::max(smax, std::abs(cs));
  }
  f_l1 *= F.cell_weight();
  const double f_l2 = F.l2_norm(), g_l2 = G.l2_norm();

  DimensionReductionReport rep;
  const GridFunction X = twisted_convolve(F, G, theta_hat, opt.jobs);
  rep.target = X.l2_norm();
  const int P = opt.bump_samples;
  for (int n = 1; n <= n_steps; ++n) {
    const double eps = std::ldexp(1.0, -n);
    const double dt = 2.0 * eps / P;
    std::vector<double> nodes, shape;
    double norm2 = 0.0;
    for (int i = 0; i < P; ++i) {
      const double t = -eps + (i + 0.5) * dt;
      const double c = std::cos(pi * t / (2.0 * eps));
      nodes.push_back(t);
      shape.push_back(c * c);
      norm2 += c * c * c * c * dt / two_pi;
    }
    const double amp = 1.0 / std::sqrt(norm2);
    double out2 = 0.0, dev2 = 0.0;
    for (int i = 0; i < P; ++i) {
      const GridFunction Y = detail::bump_free_twisted(F, G, theta_hat, coupling, nodes[i], opt.jobs);
      const double phi = amp * shape[i], wt = dt / two_pi;
      double y2 = 0.0, e2 = 0.0;
      for (std::size_t k = 0; k < Y.size(); ++k) {
        y2 += std::norm(Y[k]);
        e2 += std::norm(Y[k] - X[k]);
      }
      out2 += wt * phi * phi * y2 * Y.cell_weight();
      dev2 += wt * phi * phi * e2 * Y.cell_weight();
    }
    const double beta = 2.0 * std::sin(std::min(0.5 * smax * eps, pi) / 2.0);
    rep.eps.push_back(eps);
    rep.norms.push_back(std::sqrt(out2));
    rep.deviations.push_back(std::sqrt(dev2));
    rep.beta.push_back(beta);
    rep.paper_bounds.push_back(beta * f_l2 * g_l2);
    rep.young_bounds.push_back(beta * f_l1 * g_l2);
    rep.paper_bound_holds = rep.paper_bound_holds && rep.deviations.back() <= rep.paper_bounds.back() * (1 + 1e-9) + 1e-14;
    rep.young_bound_holds = rep.young_bound_holds && rep.deviations.back() <= rep.young_bounds.back() * (1 + 1e-9) + 1e-14;
  }
  for (std::size_t i = rep.deviations.size(); i >= 2; --i) {
    const double a = rep.deviations[i - 2], b = rep.deviations[i - 1];
    if (a > 0.0 && b > 0.0) {
      rep.observed_rate = std::log2(a / b);
      break;
    }
  }
  return rep;
}

}  // namespace nct
