#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "grid.hpp"
#include "linalg.hpp"
#include "skew_matrix.hpp"

namespace nct {

/// Failure of symplectic normalization, with the reason and the computed rank.
class symplectic_error : public rejected_input {
 public:
  enum class kind { odd_dimension, rank_deficient };

  symplectic_error(kind k, int dim, int rank)
      : rejected_input(k == kind::odd_dimension
                           ? "symplectic normalization needs even dimension, got " + std::to_string(dim)
                           : "theta is rank deficient: rank " + std::to_string(rank) + " of " + std::to_string(dim)),
        kind_(k),
        dim_(dim),
        rank_(rank) {}

  kind reason() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  int rank() const noexcept { return rank_; }

 private:
  kind kind_;
  int dim_;
  int rank_;
};

/// S = [[0, I_n], [-I_n, 0]].
inline Eigen::MatrixXd canonical_form(int n) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  s.topRightCorner(n, n).setIdentity();
  s.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return s;
}

struct SymplecticForm {
  SkewMatrix theta;
  /// Real invertible matrix with T theta T^t = S.
  Eigen::MatrixXd T;
  Eigen::MatrixXd S;
  /// ||T theta T^t - S||_max
  double residual = 0.0;
  int modes() const { return static_cast<int>(S.rows()) / 2; }
};

struct SkewDecomposition {
  SkewMatrix theta;
  int rank = 0;
  /// Rows x_1..x_r, y_1..y_r, then d - 2r kernel directions; basis theta basis^t = S_r (+) 0.
  Eigen::MatrixXd basis;
  double residual = 0.0;
};

namespace detail {

/// Skew Gram-Schmidt on the standard basis, pivoting on the largest |theta(v_a, v_b)|.
/// Runs `planes` deflation steps and returns the basis rows described in SkewDecomposition.
inline Eigen::MatrixXd skew_gram_schmidt(const Eigen::MatrixXd& theta, int planes) {
  const int d = static_cast<int>(theta.rows());
  std::vector<Eigen::VectorXd> work;
  for (int i = 0; i < d; ++i) work.push_back(Eigen::VectorXd::Unit(d, i));
  auto omega = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.dot(theta * b); };
  std::vector<Eigen::VectorXd> xs, ys;
  for (int step = 0; step < planes; ++step) {
    std::size_t best_a = 0, best_b = 1;
    double best = -1.0;
    for (std::size_t a = 0; a < work.size(); ++a)
      for (std::size_t b = a + 1; b < work.size(); ++b) {
        const double g = std::abs(omega(work[a], work[b]));
        if (g > best) {
          best = g;
          best_a = a;
          best_b = b;
        }
      }
    const Eigen::VectorXd x = work[best_a];
    const Eigen::VectorXd y = work[best_b] / omega(work[best_a], work[best_b]);
    work.erase(work.begin() + static_cast<std::ptrdiff_t>(best_b));
    work.erase(work.begin() + static_cast<std::ptrdiff_t>(best_a));
    for (auto& v : work) {
      const double vy = omega(v, y), vx = omega(v, x);
      v = v - vy * x + vx * y;
    }
    xs.push_back(x);
    ys.push_back(y);
  }
  Eigen::MatrixXd basis(d, d);
  int row = 0;
  for (const auto& x : xs) basis.row(row++) = x.transpose();
  for (const auto& y : ys) basis.row(row++) = y.transpose();
  for (const auto& v : work) basis.row(row++) = v.transpose();
  return basis;
}

inline int skew_rank(const Eigen::MatrixXd& theta, double rel_tol) {
  if (theta.size() == 0) return 0;
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(theta).singularValues();
  const double cut = rel_tol * sv(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut && sv(i) > 0.0) ++r;
  return r - r % 2;
}

}  // namespace detail

/// Finds T with T theta T^t = S by skew Gram-Schmidt.
inline SymplecticForm symplectic_normalize(const SkewMatrix& theta) {
  const int d = theta.dim();
  if (d % 2 != 0) throw symplectic_error(symplectic_error::kind::odd_dimension, d, detail::skew_rank(theta.matrix(), 1e-10));
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(theta.matrix()).singularValues();
  if (sv(d - 1) <= 1e-8 * sv(0) || sv(0) == 0.0)
    throw symplectic_error(symplectic_error::kind::rank_deficient, d, detail::skew_rank(theta.matrix(), 1e-8));
  SymplecticForm out{theta, detail::skew_gram_schmidt(theta.matrix(), d / 2), canonical_form(d / 2), 0.0};
  out.residual = (out.T * theta.matrix() * out.T.transpose() - out.S).cwiseAbs().maxCoeff();
  return out;
}

inline SkewDecomposition skew_rank_decompose(const SkewMatrix& theta) {
  const int d = theta.dim();
  SkewDecomposition out{theta, detail::skew_rank(theta.matrix(), 1e-10), Eigen::MatrixXd::Identity(d, d), 0.0};
  const int r = out.rank / 2;
  out.basis = detail::skew_gram_schmidt(theta.matrix(), r);
  Eigen::MatrixXd target = Eigen::MatrixXd::Zero(d, d);
  if (r > 0) target.topLeftCorner(2 * r, 2 * r) = canonical_form(r);
  out.residual = (out.basis * theta.matrix() * out.basis.transpose() - target).cwiseAbs().maxCoeff();
  return out;
}

/// Spectral derivative -i d/dx on a periodic grid, Hermitian.
inline CMatrix spectral_momentum(const Grid1D& g) {
  const int m = g.M;
  CMatrix out(m, m);
  const Eigen::VectorXd x = g.points(), k = g.wavenumbers();
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      cplx acc = 0.0;
      for (int j = 0; j < m; ++j) acc += k(j) * std::polar(1.0, k(j) * (x(a) - x(b)));
      out(a, b) = acc / static_cast<double>(m);
    }
  return out;
}

/// P_j = sum_k R_jk (-i d/dx_k) + R_{j,k+n} x_k with R = T^{-1}, on the tensor
/// grid with the first mode most significant; [P_j, P_k] ~ -i theta_jk.
inline std::vector<CMatrix> schrodinger_generators(const SymplecticForm& sf, const Grid1D& grid,
                                                   long long size_cap = 4096) {
  grid.validate();
  const int n = sf.modes();
  long long dim = 1;
  for (int k = 0; k < n; ++k) dim *= grid.M;
  if (static_cast<long long>(n) * dim > size_cap) throw size_cap_exceeded("schrodinger generators", n * dim, size_cap);
  const CMatrix p1 = spectral_momentum(grid);
  const CMatrix x1 = grid.points().cast<cplx>().asDiagonal();
  auto embed = [&](const CMatrix& op, int mode) {
    CMatrix acc = CMatrix::Identity(1, 1);
    for (int s = 0; s < n; ++s) acc = kron(acc, s == mode ? op : CMatrix::Identity(grid.M, grid.M));
    return acc;
  };
  std::vector<CMatrix> mom, pos;
  for (int k = 0; k < n; ++k) {
    mom.push_back(embed(p1, k));
    pos.push_back(embed(x1, k));
  }
  const Eigen::MatrixXd r = sf.T.inverse();
  std::vector<CMatrix> out;
  for (int j = 0; j < 2 * n; ++j) {
    CMatrix pj = CMatrix::Zero(dim, dim);
    for (int k = 0; k < n; ++k) pj += r(j, k) * mom[k] + r(j, k + n) * pos[k];
    out.push_back(std::move(pj));
  }
  return out;
}

/// Normalized tensor Gaussian prod_k exp(-(x_k - c_k)^2 / (2 w^2)) on the mode grid.
inline CVector gaussian_state(int n, const Grid1D& grid, const std::vector<double>& centers, double width = 1.0) {
  const Eigen::VectorXd x = grid.points();
  CVector acc = CVector::Ones(1);
  for (int k = 0; k < n; ++k) {
    const double c = k < static_cast<int>(centers.size()) ? centers[k] : 0.0;
    CVector g(grid.M);
    for (int i = 0; i < grid.M; ++i) g(i) = std::exp(-(x(i) - c) * (x(i) - c) / (2 * width * width));
    acc = kron(acc, g);
  }
  return acc / acc.norm();
}

/// <v, [A, B] v> / <v, v>
inline cplx commutator_expectation(const CMatrix& a, const CMatrix& b, const CVector& v) {
  const CVector w = a * (b * v) - b * (a * v);
  return v.dot(w) / v.squaredNorm();
}

/// ||(e^{i P_j s} e^{i P_k t} - e^{i s t theta_jk} e^{i P_k t} e^{i P_j s}) v|| / ||v||
inline double weyl_proxy_error(const std::vector<CMatrix>& gens, const SkewMatrix& theta, int j, int k, double s,
                               double t, const CVector& v) {
  const CMatrix ej = hermitian_exp_i(gens.at(j), s), ek = hermitian_exp_i(gens.at(k), t);
  const CVector lhs = ej * (ek * v);
  const CVector rhs = std::polar(1.0, s * t * theta(j, k)) * (ek * (ej * v));
  return (lhs - rhs).norm() / v.norm();
}

}  // namespace nct
