#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "finite_reps.hpp"
#include "moyal.hpp"
#include "random.hpp"
#include "spectra.hpp"
#include "symplectic.hpp"
#include "twisted_algebra.hpp"
#include "weyl.hpp"

namespace nct::checks {

struct CheckResult {
  std::string module;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteOptions {
  std::uint64_t seed = 0xA1B2C3D4ULL;
  int jobs = 1;
  /// Multiplies the case counts of the randomized suites.
  int scale = 1;
};

namespace detail {

inline std::string num(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

inline GridFunction gaussian_2d(int M, double L, double cx, double cy, double w, cplx phase_k = 0.0) {
  return GridFunction::sample(2, L, M, [&](std::span<const double> x) {
    const double r2 = (x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy);
    return std::exp(-r2 / (2 * w * w)) * std::exp(cplx(0, 1) * (phase_k.real() * x[0] + phase_k.imag() * x[1]));
  });
}

}  // namespace detail

inline std::vector<CheckResult> algebra_checks(const SuiteOptions& o) {
  std::vector<CheckResult> out;
  const int cases = 100 * o.scale;
  int assoc = 0, star = 0, trace_ab = 0, phi = 0, involutive = 0, positivity = 0, gns = 0;
  for (int i = 0; i < cases; ++i) {
    Rng rng = case_rng(o.seed, static_cast<std::uint64_t>(i));
    const int d = static_cast<int>(uniform_int(rng, 1, 4));
    const SkewMatrix th = random_rational_theta(d, rng);
    const auto a = random_exact_polynomial(th, 8, rng), b = random_exact_polynomial(th, 8, rng),
               c = random_exact_polynomial(th, 8, rng);
    if (poly_mul(poly_mul(a, b), c) == poly_mul(a, poly_mul(b, c))) ++assoc;
    if (poly_adjoint(poly_mul(a, b)) == poly_mul(poly_adjoint(b), poly_adjoint(a))) ++star;
    if (poly_adjoint(poly_adjoint(a)) == a) ++involutive;
    if (trace(poly_mul(a, b)) == trace(poly_mul(b, a))) ++trace_ab;
    ExactPolynomial all = a;
    for (int j = 0; j < d; ++j) all = cond_expectation(all, j);
    bool commute = true;
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        commute = commute && cond_expectation(cond_expectation(a, j), k) == cond_expectation(cond_expectation(a, k), j);
    if (commute && all == ExactPolynomial::monomial(th, MultiIndex::zero(d), trace(a))) ++phi;
    std::int64_t sq = 0;
    for (const auto& [m, cf] : a.terms())
      for (const auto& [r, g] : cf.terms()) sq += g.re * g.re + g.im * g.im;
    const auto taa = trace(poly_mul(poly_adjoint(a), a));
    if (taa == CyclotomicCoeff::integer(sq) || std::abs(taa.to_complex() - cplx(static_cast<double>(sq))) < 1e-9) ++positivity;
    if (d <= 2) {
      const NCPolynomial ca = to_complex(a);
      int deg = 0;
      for (const auto& [m, cf] : ca.terms()) deg = std::max<int>(deg, static_cast<int>(m.linf()));
      const CMatrix g = gns_matrix(ca, deg);
      const long long zero = gns_box_index(MultiIndex::zero(d), deg);
      if (std::abs(g(zero, zero) - trace(ca)) < 1e-12) ++gns;
    } else {
      ++gns;
    }
  }
  auto add = [&](const std::string& n, int ok) {
    out.push_back({"twisted_algebra", n, ok == cases, std::to_string(ok) + "/" + std::to_string(cases)});
  };
  add("associativity exact", assoc);
  add("(ab)* = b* a* exact", star);
  add("a** = a exact", involutive);
  add("tau(ab) = tau(ba) exact", trace_ab);
  add("Phi composition and commutation exact", phi);
  add("tau(a* a) = sum |alpha|^2", positivity);
  add("tau = <0|pi(a)|0>", gns);

  bool phase_ok = true;
  for (int i = 0; i < 20; ++i) {
    Rng rng = case_rng(o.seed ^ 0x51ULL, static_cast<std::uint64_t>(i));
    const int d = static_cast<int>(uniform_int(rng, 2, 4));
    const SkewMatrix th = random_rational_theta(d, rng);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        const auto uj = ExactPolynomial::generator(th, j), uk = ExactPolynomial::generator(th, k);
        const auto lhs = poly_mul(uj, uk);
        auto rhs = poly_mul(uk, uj);
        ExactPolynomial rot(th);
        for (const auto& [m, c] : rhs.terms()) rot.add_term(m, c.rotated(th.exact(j, k)));
        phase_ok = phase_ok && lhs == rot;
      }
  }
  out.push_back({"twisted_algebra", "u_j u_k = e^{2 pi i theta_jk} u_k u_j", phase_ok, ""});

  Rng rng = case_rng(o.seed ^ 0xC0C0ULL, 0);
  const SkewMatrix irr(2, std::vector<double>{std::sqrt(2.0) / 10});
  std::vector<std::array<MultiIndex, 3>> samples;
  for (int i = 0; i < 1000; ++i) samples.push_back({random_index(2, rng, 50), random_index(2, rng, 50), random_index(2, rng, 50)});
  const auto rep = cocycle_validate(irr, samples);
  out.push_back({"twisted_algebra", "cocycle identity, irrational theta", rep.max_associativity_deviation <= 1e-12,
                 "deviation " + detail::num(rep.max_associativity_deviation)});
  return out;
}

inline std::vector<CheckResult> finite_rep_checks(const SuiteOptions& o) {
  std::vector<CheckResult> out;
  bool tensor_ok = true;
  double worst = 0.0;
  for (int i = 0; i < 10 * o.scale; ++i) {
    Rng rng = case_rng(o.seed ^ 0x7E5ULL, static_cast<std::uint64_t>(i));
    const int d = static_cast<int>(uniform_int(rng, 2, 4));
    PairTable table;
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k) {
        const long long q = d == 4 ? 2 : uniform_int(rng, 2, 3);
        table.emplace(std::make_pair(j, k), clock_shift(uniform_int(rng, 0, q - 1), q));
      }
    const auto rep = verify_relations(tensor_construct(d, table));
    worst = std::max(worst, std::max(rep.commutation_residual, rep.unitarity_residual));
    tensor_ok = tensor_ok && rep.within(1e-12);
  }
  out.push_back({"finite_reps", "tensor construction relations", tensor_ok, "worst residual " + detail::num(worst)});

  bool mult = true;
  for (int i = 0; i < 10; ++i) {
    Rng rng = case_rng(o.seed ^ 0x7A7ULL, static_cast<std::uint64_t>(i));
    const long long q1 = uniform_int(rng, 1, 5), q2 = uniform_int(rng, 1, 5);
    const auto a = clock_shift(uniform_int(rng, 0, q1), q1), b = clock_shift(uniform_int(rng, 0, q2), q2);
    const auto t = tensor_translate(a, b);
    mult = mult && (t.sigma() - a.sigma().cwiseProduct(b.sigma())).cwiseAbs().maxCoeff() == 0.0 &&
           verify_relations(t).commutation_residual <= 1e-13;
  }
  out.push_back({"finite_reps", "tensor translation phase multiplicativity", mult, ""});

  int violations = 0;
  const int pairs = 50 * o.scale;
  for (int i = 0; i < pairs; ++i) {
    Rng rng = case_rng(o.seed ^ 0xD157ULL, static_cast<std::uint64_t>(i));
    const long long q1 = uniform_int(rng, 1, 6), q2 = uniform_int(rng, 1, 6);
    auto a = clock_shift(uniform_int(rng, 0, q1 - 1), q1), b = clock_shift(uniform_int(rng, 0, q2 - 1), q2);
    auto [pa, pb] = pad_to_common(a, b);
    if (uniform_int(rng, 0, 1)) pb = conjugate(pb, random_unitary(pb.size(), rng));
    if (!distance_lower_bound_check(pa, pb).holds) ++violations;
  }
  out.push_back({"finite_reps", "metric lower bound", violations == 0, std::to_string(violations) + " violations"});

  bool gns_ok = true;
  for (long long q : {2, 3, 4, 5}) {
    const SkewMatrix th(2, std::vector<Rational>{Rational(1, q)});
    const auto g = cyclic_gns_tuple(th, q);
    const auto cs = clock_shift(1, q);
    const CMatrix cg = g[0] * g[1] * g[0].adjoint() * g[1].adjoint();
    const CMatrix cc = cs[0] * cs[1] * cs[0].adjoint() * cs[1].adjoint();
    const Eigen::VectorXd s1 = Eigen::JacobiSVD<CMatrix>(cg - g.sigma()(0, 1) * CMatrix::Identity(g.size(), g.size())).singularValues();
    const Eigen::VectorXd s2 = Eigen::JacobiSVD<CMatrix>(cc - cs.sigma()(0, 1) * CMatrix::Identity(q, q)).singularValues();
    gns_ok = gns_ok && s1.maxCoeff() <= 1e-12 && s2.maxCoeff() <= 1e-12;
  }
  out.push_back({"finite_reps", "cyclic GNS commutator equals sigma", gns_ok, ""});
  return out;
}

inline std::vector<CheckResult> symplectic_checks(const SuiteOptions& o) {
  std::vector<CheckResult> out;
  int ok = 0;
  const int cases = 100 * o.scale;
  for (int i = 0; i < cases; ++i) {
    Rng rng = case_rng(o.seed ^ 0x5E11ULL, static_cast<std::uint64_t>(i));
    const int d = 2 * static_cast<int>(uniform_int(rng, 1, 3));
    const SkewMatrix th = random_nonsingular_theta(d, rng);
    Eigen::MatrixXd r(d, d);
    do {
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) r(a, b) = uniform_real(rng, -1, 1);
    } while (std::abs(r.determinant()) < 1e-2);
    Eigen::MatrixXd c = r * th.matrix() * r.transpose();
    c = ((c - c.transpose()) / 2.0).eval();
    const auto sf = symplectic_normalize(SkewMatrix::from_matrix(c));
    if (symplectic_normalize(th).residual <= 1e-10 && sf.residual <= 1e-10) ++ok;
  }
  out.push_back({"symplectic", "normalization under congruence", ok == cases, std::to_string(ok) + "/" + std::to_string(cases)});

  int rank_ok = 0;
  for (int i = 0; i < 50; ++i) {
    Rng rng = case_rng(o.seed ^ 0x4A4BULL, static_cast<std::uint64_t>(i));
    const int d = static_cast<int>(uniform_int(rng, 1, 6));
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
    const int planes = static_cast<int>(uniform_int(rng, 0, d / 2));
    for (int p = 0; p < planes; ++p) {
      b(2 * p, 2 * p + 1) = uniform_real(rng, 0.5, 2.0);
      b(2 * p + 1, 2 * p) = -b(2 * p, 2 * p + 1);
    }
    Eigen::MatrixXd r = Eigen::MatrixXd::Random(d, d) + 2.0 * Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd c = r * b * r.transpose();
    c = ((c - c.transpose()) / 2.0).eval();
    const auto dec = skew_rank_decompose(SkewMatrix::from_matrix(c));
    if (dec.rank == 2 * planes && dec.residual <= 1e-10) ++rank_ok;
  }
  out.push_back({"symplectic", "rank decomposition", rank_ok == 50, std::to_string(rank_ok) + "/50"});
  return out;
}

inline std::vector<CheckResult> moyal_checks(const SuiteOptions& o) {
  std::vector<CheckResult> out;
  const int M = 64;
  const double L = 8.0;
  const SkewMatrix th(2, std::vector<double>{0.7});
  const SkewMatrix unit(2, std::vector<double>{1.0});
  Rng rng = case_rng(o.seed ^ 0x3070ULL, 0);
  auto rnd = [&] {
    return detail::gaussian_2d(M, L, uniform_real(rng, -0.5, 0.5), uniform_real(rng, -0.5, 0.5),
                               uniform_real(rng, 0.8, 1.0), cplx(uniform_real(rng, -0.5, 0.5), uniform_real(rng, -0.5, 0.5)));
  };
  const GridFunction f = rnd(), g = rnd(), h = rnd();
  const double assoc =
      star_fourier(star_fourier(f, g, th, o.jobs), h, th, o.jobs).max_abs_difference(star_fourier(f, star_fourier(g, h, th, o.jobs), th, o.jobs));
  out.push_back({"moyal_engine", "associativity", assoc <= 1e-8, "deviation " + detail::num(assoc)});
  const double tracial = std::abs(star_fourier(f, g, th, o.jobs).integral() - f.pointwise_product(g).integral());
  out.push_back({"moyal_engine", "tracial identity", tracial <= 1e-8, "deviation " + detail::num(tracial)});
  const double comm = star_fourier(f, g, SkewMatrix::zero(2), o.jobs).max_abs_difference(f.pointwise_product(g));
  out.push_back({"moyal_engine", "star_0 is pointwise", comm <= 1e-8, "deviation " + detail::num(comm)});
  const double cross = moyal_direct(f, g, unit, 2e10, o.jobs).product.max_abs_difference(star_fourier(f, g, unit, o.jobs));
  out.push_back({"moyal_engine", "direct vs Fourier", cross <= 1e-6, "deviation " + detail::num(cross)});
  return out;
}

inline std::vector<CheckResult> weyl_checks(const SuiteOptions& o) {
  std::vector<CheckResult> out;
  const Grid1D g{64, 8.0};
  const double group = (translation_unitary(0.3, g) * translation_unitary(0.4, g) - translation_unitary(0.7, g)).cwiseAbs().maxCoeff();
  const double mod = (modulation_unitary(0.3, g) * modulation_unitary(0.4, g) - modulation_unitary(0.7, g)).cwiseAbs().maxCoeff();
  out.push_back({"weyl_dynamics", "group laws", group <= 1e-13 && mod <= 1e-13, "deviation " + detail::num(std::max(group, mod))});
  const Grid1D sg = Grid1D::symmetric(64);
  const auto comm = weyl_residual(1.0, sg.dk(), sg.h(), sg);
  out.push_back({"weyl_dynamics", "commensurate Weyl residual", comm.commensurate && comm.operator_residual <= 1e-12,
                 "residual " + detail::num(comm.operator_residual)});
  const auto study = weyl_refinement_study(1.0, 0.37, 0.37, {64, 128, 256});
  out.push_back({"weyl_dynamics", "Weyl residual under refinement", study.decreasing_or_floor,
                 "residuals " + detail::num(study.residuals[0]) + " " + detail::num(study.residuals[1]) + " " +
                     detail::num(study.residuals[2])});
  int violations = 0;
  for (int i = 0; i < 100 * o.scale; ++i) {
    Rng rng = case_rng(o.seed ^ 0x9E4ULL, static_cast<std::uint64_t>(i));
    const Eigen::Index n = uniform_int(rng, 1, 16);
    const HermitianPair hp(random_hermitian(n, rng), random_hermitian(n, rng));
    std::vector<double> ts;
    for (int k = 0; k < 8; ++k) ts.push_back(uniform_real(rng, -3, 3));
    violations += static_cast<int>(generator_bound_check(hp, ts).violations);
  }
  out.push_back({"weyl_dynamics", "generator bound necessity", violations == 0, std::to_string(violations) + " violations"});

  UnitaryFieldSample w{[](double x, double y) { return CMatrix(CMatrix::Identity(1, 1) * std::polar(1.0, y * std::atan(x))); },
                       4.0, 4.0, 1e-2, 1};
  Eigen::MatrixXd delta(3, 3);
  delta << 0, 0.7, -0.4, 0, 0, 0.9, 0, 0, 0;
  const std::vector<std::vector<double>> pts{{0.3, -0.8, 1.1}, {-1.2, 0.5, 0.7}, {0.9, 1.3, -1.4}};
  const double d1 = assemble_W(w, delta, 3, pts).identity_deviation;
  w.h /= 2;
  const double d2 = assemble_W(w, delta, 3, pts).identity_deviation;
  const double order = std::log2(d1 / d2);
  out.push_back({"weyl_dynamics", "W identity second order", order >= 1.8 && order <= 2.2, "order " + detail::num(order)});

  const auto audit = audit_interpolation_constants(8100, 2500);
  out.push_back({"weyl_dynamics", "interpolation constant audit", audit.holds && audit.levels_hold && audit.slack == 26.0,
                 "slack " + detail::num(audit.slack)});
  return out;
}

inline std::vector<CheckResult> spectra_checks(const SuiteOptions& o) {
  std::vector<CheckResult> out;
  double sym = 0.0;
  bool inside = true;
  for (long long q = 2; q <= 7; ++q)
    for (long long p = 1; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      const auto a = amo_spectrum(p, q, 16, o.jobs), b = amo_spectrum(q - p, q, 16, o.jobs);
      sym = std::max(sym, hausdorff_distance(a, b));
      inside = inside && a.min() >= -4 - 1e-12 && a.max() <= 4 + 1e-12 && static_cast<long long>(a.bands.size()) <= q;
    }
  out.push_back({"spectra", "flux symmetry", sym <= 1e-9, "max distance " + detail::num(sym)});
  out.push_back({"spectra", "spectrum within [-4, 4], at most q bands", inside, ""});
  bool tri = true;
  for (int i = 0; i < 200; ++i) {
    Rng rng = case_rng(o.seed ^ 0x4A5ULL, static_cast<std::uint64_t>(i));
    auto rnd = [&] {
      std::vector<Band> bs;
      const int n = static_cast<int>(uniform_int(rng, 1, 4));
      for (int k = 0; k < n; ++k) {
        const double a = uniform_real(rng, -5, 5);
        bs.push_back({a, a + uniform_real(rng, 0, 2)});
      }
      return make_spectrum(bs);
    };
    const auto A = rnd(), B = rnd(), C = rnd();
    const double ab = hausdorff_distance(A, B), bc = hausdorff_distance(B, C), ac = hausdorff_distance(A, C);
    tri = tri && ac <= ab + bc + 1e-12 && ab == hausdorff_distance(B, A) && hausdorff_distance(A, A) == 0.0;
  }
  out.push_back({"spectra", "Hausdorff metric axioms", tri, ""});
  return out;
}

/// Every module's property suite at desk-scale sizes.
inline std::vector<CheckResult> run_property_suite(const SuiteOptions& o = {}) {
  std::vector<CheckResult> all;
  for (auto part : {algebra_checks(o), finite_rep_checks(o), symplectic_checks(o), moyal_checks(o), weyl_checks(o),
                    spectra_checks(o)})
    all.insert(all.end(), part.begin(), part.end());
  return all;
}

}  // namespace nct::checks
