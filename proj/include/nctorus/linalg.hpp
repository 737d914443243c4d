#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace nct {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// e^{2 pi i x}, with x reduced modulo 1 first to keep the argument small.
inline cplx unit_phase(double x) {
  const double r = x - std::floor(x);
  const double q = 4.0 * r;
  if (q == std::floor(q)) {
    static constexpr cplx quarter[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    return quarter[static_cast<int>(q)];
  }
  return std::polar(1.0, two_pi * r);
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

struct PowerIterationOptions {
  double tol = 1e-10;
  int max_iter = 2000;
  /// Matrices with both sides below this size use a full SVD instead.
  Eigen::Index dense_cutoff = 512;
};

/// Largest singular value of the operator given by apply / apply_adjoint.
template <class Apply, class ApplyAdjoint>
double power_norm(Apply&& apply, ApplyAdjoint&& apply_adjoint, Eigen::Index n, const PowerIterationOptions& opt = {}) {
  if (n == 0) return 0.0;
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CVector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = cplx(1.0 + 0.5 * u(rng), 0.5 * u(rng));
  x.normalize();
  double prev = -1.0;
  double sigma = 0.0;
  for (int it = 0; it < opt.max_iter; ++it) {
    CVector y = apply(x);
    sigma = y.norm();
    if (sigma == 0.0) return 0.0;
    CVector z = apply_adjoint(y);
    const double zn = z.norm();
    if (zn == 0.0) return sigma;
    x = z / zn;
    if (prev >= 0.0 && std::abs(sigma - prev) <= opt.tol * sigma) break;
    prev = sigma;
  }
  return sigma;
}

/// Operator 2-norm of a dense matrix.
inline double spectral_norm(const CMatrix& a, const PowerIterationOptions& opt = {}) {
  if (a.size() == 0) return 0.0;
  if (std::max(a.rows(), a.cols()) < opt.dense_cutoff) {
    Eigen::BDCSVD<CMatrix> svd(a);
    return svd.singularValues()(0);
  }
  return power_norm([&](const CVector& v) -> CVector { return a * v; },
                    [&](const CVector& v) -> CVector { return a.adjoint() * v; }, a.cols(), opt);
}

inline double unitarity_residual(const CMatrix& u) {
  return spectral_norm(u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols()));
}

inline bool is_hermitian(const CMatrix& a, double tol) {
  return a.rows() == a.cols() && (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// exp(i t P) for Hermitian P via its eigendecomposition.
inline CMatrix hermitian_exp_i(const CMatrix& p, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(p);
  const Eigen::VectorXd& ev = es.eigenvalues();
  CVector ph(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) ph(i) = std::polar(1.0, t * ev(i));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

/// Numerical rank from singular values above tol * max(1, sigma_max).
inline Eigen::Index numerical_rank(const CMatrix& a, double tol) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<CMatrix> svd(a);
  const auto& s = svd.singularValues();
  const double cut = tol * std::max(1.0, s(0));
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  return r;
}

}  // namespace nct
