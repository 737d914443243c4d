#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "finite_reps.hpp"
#include "linalg.hpp"
#include "rational.hpp"
#include "skew_matrix.hpp"
#include "twisted_algebra.hpp"

namespace nct {

using Rng = std::mt19937_64;

/// Independent generator for case i of a suite seeded by seed.
inline Rng case_rng(std::uint64_t seed, std::uint64_t i) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
  return Rng(seq);
}

inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Rational random_rational(Rng& rng, std::int64_t max_den) {
  const std::int64_t q = uniform_int(rng, 1, max_den);
  return Rational(uniform_int(rng, -q, q), q);
}

inline SkewMatrix random_rational_theta(int d, Rng& rng, std::int64_t max_den = 12) {
  std::vector<Rational> u;
  for (std::size_t i = 0; i < SkewMatrix::upper_size(d); ++i) u.push_back(random_rational(rng, max_den));
  return SkewMatrix(d, u);
}

inline SkewMatrix random_real_theta(int d, Rng& rng, double scale = 1.0) {
  std::vector<double> u;
  for (std::size_t i = 0; i < SkewMatrix::upper_size(d); ++i) u.push_back(uniform_real(rng, -scale, scale));
  return SkewMatrix(d, u);
}

inline MultiIndex random_index(int d, Rng& rng, std::int64_t range) {
  MultiIndex m = MultiIndex::zero(d);
  for (int j = 0; j < d; ++j) m[j] = uniform_int(rng, -range, range);
  return m;
}

inline ExactPolynomial random_exact_polynomial(const SkewMatrix& theta, int max_terms, Rng& rng,
                                               std::int64_t range = 3, std::int64_t coeff = 5) {
  ExactPolynomial p(theta);
  const int n = static_cast<int>(uniform_int(rng, 1, max_terms));
  for (int i = 0; i < n; ++i)
    p.add_term(random_index(theta.dim(), rng, range),
               CyclotomicCoeff::integer(uniform_int(rng, -coeff, coeff), uniform_int(rng, -coeff, coeff)));
  return p;
}

inline NCPolynomial random_polynomial(const SkewMatrix& theta, int max_terms, Rng& rng, std::int64_t range = 3) {
  NCPolynomial p(theta);
  const int n = static_cast<int>(uniform_int(rng, 1, max_terms));
  for (int i = 0; i < n; ++i)
    p.add_term(random_index(theta.dim(), rng, range), cplx(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1)));
  return p;
}

inline CMatrix random_complex(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> g;
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = cplx(g(rng), g(rng));
  return m;
}

inline CMatrix random_hermitian(Eigen::Index n, Rng& rng) {
  const CMatrix a = random_complex(n, rng);
  CMatrix h = (a + a.adjoint()) / 2.0;
  return (h + h.adjoint()) / 2.0;
}

/// Haar-distributed unitary from the QR factorization of a Gaussian matrix.
inline CMatrix random_unitary(Eigen::Index n, Rng& rng) {
  Eigen::HouseholderQR<CMatrix> qr(random_complex(n, rng));
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

/// Random nonsingular skew matrix with entries in [-1, 1], redrawn while near-singular.
inline SkewMatrix random_nonsingular_theta(int d, Rng& rng, double min_ratio = 1e-3) {
  for (;;) {
    SkewMatrix t = random_real_theta(d, rng);
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(t.matrix()).singularValues();
    if (sv(d - 1) > min_ratio * sv(0)) return t;
  }
}

}  // namespace nct
