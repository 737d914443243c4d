#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "errors.hpp"
#include "linalg.hpp"
#include "rational.hpp"
#include "skew_matrix.hpp"
#include "twisted_algebra.hpp"

namespace nct {

inline constexpr long long default_size_cap = 4096;

/// d unitary matrices on a common space with their declared phase matrix,
/// intended to satisfy u_j u_k = sigma_jk u_k u_j.
///
/// Construction checks shapes and the structure of sigma. Relation residuals
/// are measured by verify_relations, so deliberately defective tuples can be
/// represented.
class UnitaryTuple {
 public:
  UnitaryTuple(std::vector<CMatrix> matrices, CMatrix sigma, double tol = 1e-12)
      : u_(std::move(matrices)), sigma_(std::move(sigma)), tol_(tol) {
    if (u_.empty()) throw rejected_input("unitary tuple needs at least one matrix");
    const Eigen::Index n = u_.front().rows();
    for (const auto& m : u_)
      if (m.rows() != n || m.cols() != n) throw rejected_input("unitary tuple matrices must be square of equal size");
    const Eigen::Index d = static_cast<Eigen::Index>(u_.size());
    if (sigma_.rows() != d || sigma_.cols() != d) throw rejected_input("sigma must be d x d");
    if (tol_ < 0) throw rejected_input("tolerance must be non-negative");
    const double stol = std::max(tol_, 1e-12);
    for (Eigen::Index j = 0; j < d; ++j) {
      if (std::abs(sigma_(j, j) - 1.0) > stol) throw rejected_input("sigma diagonal must be 1");
      for (Eigen::Index k = 0; k < d; ++k) {
        if (std::abs(std::abs(sigma_(j, k)) - 1.0) > stol) throw rejected_input("sigma entries must have modulus 1");
        if (std::abs(sigma_(k, j) - std::conj(sigma_(j, k))) > stol) throw rejected_input("sigma must be Hermitian");
      }
    }
  }

  /// Phase matrix sigma_jk = e^{2 pi i theta_jk}.
  static CMatrix sigma_from_theta(const SkewMatrix& theta) {
    const int d = theta.dim();
    CMatrix s(d, d);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        s(j, k) = theta.is_rational() ? PhaseExponent(theta.exact(j, k)).phase() : unit_phase(theta(j, k));
    return s;
  }

  int count() const noexcept { return static_cast<int>(u_.size()); }
  Eigen::Index size() const noexcept { return u_.front().rows(); }
  const CMatrix& operator[](int j) const { return u_.at(static_cast<std::size_t>(j)); }
  const std::vector<CMatrix>& matrices() const noexcept { return u_; }
  const CMatrix& sigma() const noexcept { return sigma_; }
  double tol() const noexcept { return tol_; }

 private:
  std::vector<CMatrix> u_;
  CMatrix sigma_;
  double tol_;
};

inline UnitaryTuple identity_tuple(int d, Eigen::Index n) {
  if (d < 1 || n < 1) throw rejected_input("identity tuple needs d >= 1 and n >= 1");
  return UnitaryTuple(std::vector<CMatrix>(static_cast<std::size_t>(d), CMatrix::Identity(n, n)),
                      CMatrix::Ones(d, d), 0.0);
}

/// U = diag(w^k), V e_k = e_{k+1 mod q}, with w = e^{2 pi i p/q}, so UV = w VU.
inline UnitaryTuple clock_shift(long long p, long long q) {
  if (q < 1) throw rejected_input("clock_shift needs q >= 1");
  const Rational r = Rational(p, q);
  CMatrix u = CMatrix::Zero(q, q), v = CMatrix::Zero(q, q);
  for (long long k = 0; k < q; ++k) {
    u(k, k) = PhaseExponent(r * Rational(k)).phase();
    v((k + 1) % q, k) = 1.0;
  }
  CMatrix s = CMatrix::Ones(2, 2);
  s(0, 1) = PhaseExponent(r).phase();
  s(1, 0) = std::conj(s(0, 1));
  return UnitaryTuple({u, v}, s, 1e-14);
}

struct RelationReport {
  double commutation_residual = 0.0;
  double unitarity_residual = 0.0;
  /// Pair (j, k), j < k, attaining the commutation residual; (-1, -1) if d = 1.
  std::pair<int, int> worst_pair{-1, -1};
  /// Generator attaining the unitarity residual.
  int worst_generator = 0;
  bool within(double tol) const { return commutation_residual <= tol && unitarity_residual <= tol; }
};

namespace detail {

using SparseC = Eigen::SparseMatrix<cplx>;

inline bool mostly_sparse(const CMatrix& a) {
  if (a.rows() < 64) return false;
  const Eigen::Index nnz = (a.array() != cplx(0.0)).count();
  return nnz * 20 <= a.size();
}

inline double sparse_norm(const SparseC& x) {
  SparseC c = x;
  c.prune(cplx(0.0), 0.0);
  if (c.nonZeros() == 0) return 0.0;
  if (c.rows() < 512) return spectral_norm(CMatrix(c));
  const SparseC ca = c.adjoint();
  return power_norm([&](const CVector& v) -> CVector { return c * v; },
                    [&](const CVector& v) -> CVector { return ca * v; }, c.cols());
}

}  // namespace detail

/// Measures max_{j<k} ||u_j u_k - sigma_jk u_k u_j|| and max_j ||u_j^* u_j - I||.
inline RelationReport verify_relations(const UnitaryTuple& t) {
  RelationReport rep;
  const int d = t.count();
  const Eigen::Index n = t.size();
  bool sparse = true;
  for (const auto& m : t.matrices()) sparse = sparse && detail::mostly_sparse(m);
  std::vector<detail::SparseC> s;
  detail::SparseC id(n, n);
  if (sparse) {
    for (const auto& m : t.matrices()) s.push_back(m.sparseView());
    id.setIdentity();
  }
  auto unitarity = [&](int j) {
    if (sparse) return detail::sparse_norm(detail::SparseC(s[j].adjoint() * s[j]) - id);
    return unitarity_residual(t[j]);
  };
  auto commutation = [&](int j, int k) {
    if (sparse) return detail::sparse_norm(detail::SparseC(s[j] * s[k]) - t.sigma()(j, k) * detail::SparseC(s[k] * s[j]));
    return spectral_norm(t[j] * t[k] - t.sigma()(j, k) * t[k] * t[j]);
  };
  for (int j = 0; j < d; ++j) {
    const double r = unitarity(j);
    if (r > rep.unitarity_residual) {
      rep.unitarity_residual = r;
      rep.worst_generator = j;
    }
    for (int k = j + 1; k < d; ++k) {
      const double c = commutation(j, k);
      if (rep.worst_pair.first < 0 || c > rep.commutation_residual) {
        rep.commutation_residual = c;
        rep.worst_pair = {j, k};
      }
    }
  }
  return rep;
}

/// Pairs of generators for the tensor construction, keyed by 0-based (j, k), j < k.
using PairTable = std::map<std::pair<int, int>, UnitaryTuple>;

/// Builds d unitaries on the tensor product of one component space per pair
/// (j, k), ordered (0,1), (0,2), ..., (1,2), ... . Generator j acts by the
/// first matrix of pair (j, k) for k > j, by the second matrix of pair (k, j)
/// for k < j, and by the identity on every other component.
inline UnitaryTuple tensor_construct(int d, const PairTable& pairs, long long size_cap = default_size_cap) {
  if (d < 1) throw rejected_input("tensor construction needs d >= 1");
  std::vector<const UnitaryTuple*> comps;
  long long total = 1;
  double tol = 0.0;
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      auto it = pairs.find({j, k});
      if (it == pairs.end())
        throw rejected_input("missing pair (" + std::to_string(j + 1) + "," + std::to_string(k + 1) + ")");
      if (it->second.count() != 2) throw rejected_input("pair table entries must be 2-tuples");
      comps.push_back(&it->second);
      total *= it->second.size();
      if (total > size_cap) throw size_cap_exceeded("tensor construction", total, size_cap);
      tol += it->second.tol();
    }
  CMatrix sigma = CMatrix::Ones(d, d);
  std::vector<CMatrix> gens;
  for (int g = 0; g < d; ++g) {
    CMatrix acc = CMatrix::Identity(1, 1);
    std::size_t c = 0;
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k, ++c) {
        const UnitaryTuple& p = *comps[c];
        if (g == j)
          acc = kron(acc, p[0]);
        else if (g == k)
          acc = kron(acc, p[1]);
        else
          acc = kron(acc, CMatrix::Identity(p.size(), p.size()));
      }
    gens.push_back(std::move(acc));
  }
  std::size_t c = 0;
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k, ++c) {
      sigma(j, k) = comps[c]->sigma()(0, 1);
      sigma(k, j) = std::conj(sigma(j, k));
    }
  return UnitaryTuple(std::move(gens), std::move(sigma), std::max(tol, 1e-14));
}

/// Componentwise tensor v_j = a_j (x) b_j; the phases multiply.
inline UnitaryTuple tensor_translate(const UnitaryTuple& a, const UnitaryTuple& b, long long size_cap = default_size_cap) {
  if (a.count() != b.count()) throw rejected_input("tensor translation needs tuples of equal length");
  const long long n = static_cast<long long>(a.size()) * b.size();
  if (n > size_cap) throw size_cap_exceeded("tensor translation", n, size_cap);
  std::vector<CMatrix> v;
  for (int j = 0; j < a.count(); ++j) v.push_back(kron(a[j], b[j]));
  return UnitaryTuple(std::move(v), a.sigma().cwiseProduct(b.sigma()), a.tol() + b.tol());
}

/// Conjugates every generator by a unitary w: u_j -> w u_j w^*.
inline UnitaryTuple conjugate(const UnitaryTuple& t, const CMatrix& w) {
  if (w.rows() != t.size() || w.cols() != t.size()) throw rejected_input("conjugating unitary has wrong size");
  std::vector<CMatrix> v;
  for (const auto& m : t.matrices()) v.push_back(w * m * w.adjoint());
  return UnitaryTuple(std::move(v), t.sigma(), t.tol() + 1e-13);
}

/// Tensors each tuple with an identity so both act on a space of size lcm(n_a, n_b).
inline std::pair<UnitaryTuple, UnitaryTuple> pad_to_common(const UnitaryTuple& a, const UnitaryTuple& b,
                                                           long long size_cap = default_size_cap) {
  if (a.count() != b.count()) throw rejected_input("tuples have different length");
  const long long n = std::lcm(static_cast<long long>(a.size()), static_cast<long long>(b.size()));
  if (n > size_cap) throw size_cap_exceeded("common padding", n, size_cap);
  auto pad = [&](const UnitaryTuple& t) {
    if (t.size() == n) return t;
    return tensor_translate(t, identity_tuple(t.count(), n / t.size()), size_cap);
  };
  return {pad(a), pad(b)};
}

struct LowerBoundReport {
  bool holds = true;
  /// max_j ||a_j - b_j||
  double distance = 0.0;
  /// (1/2) max_{j,k} |sigma_jk - sigma'_jk|^{1/2}
  double bound = 0.0;
  double slack = 0.0;
};

/// Necessary condition max_j ||a_j - b_j|| >= (1/2) max_{j,k} |sigma_jk - sigma'_jk|^{1/2}.
inline LowerBoundReport distance_lower_bound_check(const UnitaryTuple& a, const UnitaryTuple& b) {
  if (a.count() != b.count()) throw rejected_input("tuples have different length");
  if (a.size() != b.size()) throw rejected_input("tuples act on spaces of different size; pad_to_common first");
  LowerBoundReport rep;
  for (int j = 0; j < a.count(); ++j) rep.distance = std::max(rep.distance, spectral_norm(a[j] - b[j]));
  rep.bound = 0.5 * std::sqrt((a.sigma() - b.sigma()).cwiseAbs().maxCoeff());
  rep.slack = rep.distance - rep.bound;
  rep.holds = rep.slack >= -1e-12;
  return rep;
}

/// Cyclic GNS model on l2(Z_q^d): u_j |m> = e^{2 pi i c(e_j, m)} |m + e_j mod q>.
///
/// Requires q theta_jk to be an integer for all j, k so the phases are q-periodic.
inline UnitaryTuple cyclic_gns_tuple(const SkewMatrix& theta, long long q, long long size_cap = default_size_cap) {
  if (!theta.is_rational()) throw rejected_input("cyclic GNS model needs a rational theta");
  if (q < 1) throw rejected_input("cyclic GNS model needs q >= 1");
  const int d = theta.dim();
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k)
      if (!(theta.exact(j, k) * Rational(q)).is_integer())
        throw rejected_input("q theta must be integral for the cyclic GNS model");
  long long n = 1;
  for (int j = 0; j < d; ++j) {
    n *= q;
    if (n > size_cap) throw size_cap_exceeded("cyclic GNS model", n, size_cap);
  }
  auto point = [&](long long idx) {
    MultiIndex m = MultiIndex::zero(d);
    for (int j = d - 1; j >= 0; --j) {
      m[j] = idx % q;
      idx /= q;
    }
    return m;
  };
  auto index = [&](const MultiIndex& m) {
    long long idx = 0;
    for (int j = 0; j < d; ++j) idx = idx * q + (((m[j] % q) + q) % q);
    return idx;
  };
  std::vector<CMatrix> gens;
  for (int g = 0; g < d; ++g) {
    CMatrix u = CMatrix::Zero(n, n);
    const MultiIndex e = MultiIndex::unit(d, g);
    for (long long c = 0; c < n; ++c) {
      const MultiIndex m = point(c);
      u(index(m + e), c) = structure_phase(e, m, theta).phase();
    }
    gens.push_back(std::move(u));
  }
  return UnitaryTuple(std::move(gens), UnitaryTuple::sigma_from_theta(theta), 1e-13);
}

/// n self-adjoint matrices with c_j c_k + c_k c_j = 2 delta_jk.
struct CliffordSet {
  int n = 0;
  std::vector<CMatrix> matrices;
  Eigen::Index size() const { return matrices.empty() ? 1 : matrices.front().rows(); }
  /// max_{j,k} ||c_j c_k + c_k c_j - 2 delta_jk I||
  double anticommutator_residual() const {
    double r = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        CMatrix x = matrices[j] * matrices[k] + matrices[k] * matrices[j];
        if (j == k) x -= 2.0 * CMatrix::Identity(size(), size());
        r = std::max(r, x.cwiseAbs().maxCoeff());
      }
    return r;
  }
};

/// Jordan-Wigner ladder on ceil(n/2) qubits: c_{2i} = Z..Z X I..I, c_{2i+1} = Z..Z Y I..I.
inline CliffordSet clifford_generators(int n) {
  if (n < 1 || n > 12) throw rejected_input("clifford_generators supports 1 <= n <= 12");
  const int qubits = (n + 1) / 2;
  CMatrix x(2, 2), y(2, 2), z(2, 2), id = CMatrix::Identity(2, 2);
  x << 0, 1, 1, 0;
  y << 0, cplx(0, -1), cplx(0, 1), 0;
  z << 1, 0, 0, -1;
  CliffordSet out;
  out.n = n;
  for (int g = 0; g < n; ++g) {
    const int site = g / 2;
    CMatrix acc = CMatrix::Identity(1, 1);
    for (int s = 0; s < qubits; ++s) acc = kron(acc, s < site ? z : s == site ? (g % 2 == 0 ? x : y) : id);
    out.matrices.push_back(std::move(acc));
  }
  return out;
}

/// Truncated annihilation operator on span{phi_0, ..., phi_cutoff}: a phi_m = sqrt(m) phi_{m-1}.
inline CMatrix truncated_annihilation(int cutoff) {
  CMatrix a = CMatrix::Zero(cutoff + 1, cutoff + 1);
  for (int m = 1; m <= cutoff; ++m) a(m - 1, m) = std::sqrt(static_cast<double>(m));
  return a;
}

struct FockReport {
  int n = 0;
  int cutoff = 0;
  Eigen::Index clifford_dim = 0;
  /// max over interior basis vectors e of ||(A^*A - 1 (x) sum_j a_j a_j^*) e||
  double identity_residual = 0.0;
  /// max over interior basis vectors e of ||((sum_j a_j a_j^*) - (|m| + n)) phi_m||
  double number_residual = 0.0;
  /// dimension of ker A^* on the span of interior basis vectors
  Eigen::Index interior_kernel_dim = 0;
  /// ||(A^*A - 1 (x) sum_j a_j a_j^*) restricted to the interior|| as an operator
  double identity_operator_residual = 0.0;
};

/// Builds a_j on the occupation basis {m : max_j m_j <= cutoff} (first mode
/// most significant), A = sum_j c_j (x) a_j^*, and checks A^*A = 1 (x) sum_j a_j a_j^*
/// and (sum_j a_j a_j^*) phi_m = (|m| + n) phi_m on interior vectors (all m_j < cutoff).
inline FockReport fock_identities_check(int n, int cutoff, long long size_cap = default_size_cap) {
  if (n < 1) throw rejected_input("fock check needs n >= 1");
  if (cutoff < 1) throw rejected_input("fock check needs cutoff >= 1");
  const CliffordSet cl = clifford_generators(n);
  const Eigen::Index cd = cl.size();
  long long fock = 1;
  for (int j = 0; j < n; ++j) {
    fock *= cutoff + 1;
    if (fock * cd > size_cap) throw size_cap_exceeded("fock identities", fock * cd, size_cap);
  }
  const CMatrix a1 = truncated_annihilation(cutoff);
  std::vector<CMatrix> a;
  for (int j = 0; j < n; ++j) {
    CMatrix acc = CMatrix::Identity(1, 1);
    for (int s = 0; s < n; ++s) acc = kron(acc, s == j ? a1 : CMatrix::Identity(cutoff + 1, cutoff + 1));
    a.push_back(std::move(acc));
  }
  CMatrix big_a = CMatrix::Zero(cd * fock, cd * fock);
  CMatrix number = CMatrix::Zero(fock, fock);
  for (int j = 0; j < n; ++j) {
    big_a += kron(cl.matrices[j], a[j].adjoint());
    number += a[j] * a[j].adjoint();
  }
  const CMatrix diff = big_a.adjoint() * big_a - kron(CMatrix::Identity(cd, cd), number);

  std::vector<Eigen::Index> interior_fock;
  std::vector<int> occupation;
  for (long long idx = 0; idx < fock; ++idx) {
    long long r = idx;
    int total = 0;
    bool interior = true;
    for (int s = 0; s < n; ++s) {
      const int m = static_cast<int>(r % (cutoff + 1));
      r /= cutoff + 1;
      total += m;
      interior = interior && m < cutoff;
    }
    if (interior) {
      interior_fock.push_back(idx);
      occupation.push_back(total);
    }
  }
  FockReport rep;
  rep.n = n;
  rep.cutoff = cutoff;
  rep.clifford_dim = cd;
  for (std::size_t i = 0; i < interior_fock.size(); ++i) {
    CVector e = CVector::Zero(fock);
    e(interior_fock[i]) = 1.0;
    rep.number_residual = std::max(rep.number_residual, (number * e - (occupation[i] + n) * e).norm());
  }
  std::vector<Eigen::Index> cols;
  for (Eigen::Index c = 0; c < cd; ++c)
    for (auto f : interior_fock) cols.push_back(c * fock + f);
  CMatrix restricted(diff.rows(), static_cast<Eigen::Index>(cols.size()));
  CMatrix a_star(big_a.rows(), static_cast<Eigen::Index>(cols.size()));
  const CMatrix big_a_adj = big_a.adjoint();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    restricted.col(static_cast<Eigen::Index>(i)) = diff.col(cols[i]);
    a_star.col(static_cast<Eigen::Index>(i)) = big_a_adj.col(cols[i]);
    rep.identity_residual = std::max(rep.identity_residual, diff.col(cols[i]).norm());
  }
  rep.identity_operator_residual = spectral_norm(restricted);
  rep.interior_kernel_dim = a_star.cols() - numerical_rank(a_star, 1e-10);
  return rep;
}

}  // namespace nct
