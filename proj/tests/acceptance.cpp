// Acceptance runner: `acceptance N` checks criterion N (1..10), `acceptance` checks all of them.
// Prints one PASS/FAIL line per criterion and exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include <nctorus/nctorus.hpp>
#include <nctorus/random.hpp>

using namespace nct;

namespace {

constexpr std::uint64_t seed = 0xA1B2C3D4ULL;

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Outcome algebraic_exactness() {
  constexpr int cases = 1000;
  constexpr double time_limit = 30.0;
  const auto t0 = Clock::now();
  int failures = 0;
  for (int i = 0; i < cases; ++i) {
    Rng rng = case_rng(seed ^ 0x1ULL, static_cast<std::uint64_t>(i));
    const int d = static_cast<int>(uniform_int(rng, 1, 4));
    const SkewMatrix th = random_rational_theta(d, rng);
    const auto a = random_exact_polynomial(th, 8, rng), b = random_exact_polynomial(th, 8, rng),
               c = random_exact_polynomial(th, 8, rng);
    bool ok = poly_mul(poly_mul(a, b), c) == poly_mul(a, poly_mul(b, c));
    ok = ok && poly_adjoint(poly_mul(a, b)) == poly_mul(poly_adjoint(b), poly_adjoint(a));
    ok = ok && poly_adjoint(poly_adjoint(a)) == a;
    ok = ok && trace(poly_mul(a, b)) == trace(poly_mul(b, a));
    ExactPolynomial all = a;
    for (int j = 0; j < d; ++j) {
      ok = ok && cond_expectation(cond_expectation(a, j), j) == cond_expectation(a, j);
      for (int k = 0; k < d; ++k)
        ok = ok && cond_expectation(cond_expectation(a, j), k) == cond_expectation(cond_expectation(a, k), j);
      all = cond_expectation(all, j);
    }
    ok = ok && all == ExactPolynomial::monomial(th, MultiIndex::zero(d), trace(a));
    if (!ok) ++failures;
  }
  const double t = seconds_since(t0);
  return {failures == 0 && t <= time_limit,
          std::to_string(cases - failures) + "/" + std::to_string(cases) + " exact triples, " + fmt(t) + " s (limit 30 s)"};
}

Outcome tensor_construction() {
  constexpr double tol = 1e-12;
  constexpr double time_limit = 60.0;
  constexpr int trials = 20;
  const auto t0 = Clock::now();
  double worst = 0.0;
  int built = 0;
  for (int d = 1; d <= 5; ++d) {
    const long long qmax = d <= 3 ? 7 : (d == 4 ? 4 : 2);
    for (int i = 0; i < trials; ++i) {
      Rng rng = case_rng(seed ^ 0x2ULL, static_cast<std::uint64_t>(100 * d + i));
      PairTable table;
      for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
          const long long q = uniform_int(rng, 1, qmax);
          table.emplace(std::make_pair(j, k), clock_shift(uniform_int(rng, 0, q - 1), q));
        }
      const auto rep = verify_relations(tensor_construct(d, table));
      worst = std::max({worst, rep.commutation_residual, rep.unitarity_residual});
      ++built;
    }
  }
  const double t = seconds_since(t0);
  return {worst <= tol && t <= time_limit,
          std::to_string(built) + " tuples d<=5, worst residual " + fmt(worst) + " (tol 1e-12), " + fmt(t) + " s (limit 60 s)"};
}

Outcome constant_audit() {
  const auto r = audit_interpolation_constants(8100, 2500, 6);
  const bool exact = r.step_exact && *r.step_exact == Rational(2474);
  double top = 0.0;
  for (double v : r.interior_levels) top = std::max(top, v);
  for (double v : r.unit_levels) top = std::max(top, v);
  return {exact && r.holds && r.levels_hold && r.interior_levels.size() == 6,
          "step " + (r.step_exact ? r.step_exact->str() : fmt(r.step_value)) + " <= 2500, slack " + fmt(r.slack) +
              ", max over 6 levels " + fmt(top)};
}

Outcome symplectic_normalization() {
  constexpr int cases = 500;
  constexpr double tol = 1e-10;
  constexpr double time_limit = 20.0;
  const auto t0 = Clock::now();
  int ok = 0;
  double worst = 0.0;
  for (int i = 0; i < cases; ++i) {
    Rng rng = case_rng(seed ^ 0x4ULL, static_cast<std::uint64_t>(i));
    const int d = 2 * static_cast<int>(uniform_int(rng, 1, 3));
    const auto sf = symplectic_normalize(random_nonsingular_theta(d, rng));
    worst = std::max(worst, sf.residual);
    if (sf.residual <= tol) ++ok;
  }
  const double t = seconds_since(t0);
  return {ok == cases && t <= time_limit, std::to_string(ok) + "/" + std::to_string(cases) + ", worst residual " + fmt(worst) +
                                              " (tol 1e-10), " + fmt(t) + " s (limit 20 s)"};
}

Outcome metric_lower_bound() {
  constexpr int pairs = 200;
  int violations = 0, nontrivial = 0;
  double min_slack = 1e300;
  for (int i = 0; i < pairs; ++i) {
    Rng rng = case_rng(seed ^ 0x5ULL, static_cast<std::uint64_t>(i));
    const int d = static_cast<int>(uniform_int(rng, 2, 3));
    auto random_tuple = [&] {
      PairTable table;
      for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
          const long long q = uniform_int(rng, 1, 4);
          table.emplace(std::make_pair(j, k), clock_shift(uniform_int(rng, 0, q - 1), q));
        }
      return tensor_construct(d, table);
    };
    auto [a, b] = pad_to_common(random_tuple(), random_tuple());
    if (uniform_int(rng, 0, 1)) b = conjugate(b, random_unitary(b.size(), rng));
    const auto rep = distance_lower_bound_check(a, b);
    min_slack = std::min(min_slack, rep.slack);
    if (rep.bound > 0) ++nontrivial;
    if (!rep.holds) ++violations;
  }
  return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(pairs) + " pairs (" + std::to_string(nontrivial) +
                                 " with a positive bound), min slack " + fmt(min_slack)};
}

Outcome holder_continuity() {
  constexpr double slope_lo = 0.40, slope_hi = 0.60;
  constexpr double time_limit = 300.0;
  const auto t0 = Clock::now();
  std::vector<Rational> offsets;
  for (int k = 3; k <= 7; ++k) offsets.emplace_back(1, std::int64_t{1} << k);
  const auto scan = holder_scan(Rational(0), offsets, 128, 128);
  const double t = seconds_since(t0);
  std::string rows;
  for (const auto& r : scan.rows) rows += " D(" + r.delta.str() + ")=" + fmt(r.distance);
  const bool in_band = scan.slope >= slope_lo && scan.slope <= slope_hi;
  return {in_band && scan.holder_half_consistent && t <= time_limit,
          "slope " + fmt(scan.slope) + " (want [0.40, 0.60]), C_fit " + fmt(scan.C_fit) + ", pointwise D <= C_fit sqrt(delta) " +
              (scan.holder_half_consistent ? "yes" : "no") + ";" + rows + "; " + fmt(t) + " s (limit 300 s)"};
}

GridFunction gaussian(int M, double L, double cx, double cy, double w, double kx, double ky) {
  return GridFunction::sample(2, L, M, [&](std::span<const double> x) {
    const double r2 = (x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy);
    return std::exp(-r2 / (2 * w * w)) * std::polar(1.0, kx * x[0] + ky * x[1]);
  });
}

Outcome moyal_engine() {
  constexpr int M = 64;
  constexpr double L = 8.0, tol = 1e-8, cross_tol = 1e-6;
  Rng rng = case_rng(seed ^ 0x7ULL, 0);
  auto rnd = [&] {
    return gaussian(M, L, uniform_real(rng, -0.5, 0.5), uniform_real(rng, -0.5, 0.5), uniform_real(rng, 0.8, 1.0),
                    uniform_real(rng, -0.5, 0.5), uniform_real(rng, -0.5, 0.5));
  };
  const GridFunction f = rnd(), g = rnd(), h = rnd();
  const SkewMatrix th(2, std::vector<double>{0.7});
  const SkewMatrix unit(2, std::vector<double>{1.0});
  const double pointwise = star_fourier(f, g, SkewMatrix::zero(2)).max_abs_difference(f.pointwise_product(g));
  const double assoc = star_fourier(star_fourier(f, g, th), h, th).max_abs_difference(star_fourier(f, star_fourier(g, h, th), th));
  const double tracial = std::abs(star_fourier(f, g, th).integral() - f.pointwise_product(g).integral());
  const double cross = moyal_direct(f, g, unit).product.max_abs_difference(star_fourier(f, g, unit));
  return {pointwise <= tol && assoc <= tol && tracial <= tol && cross <= cross_tol,
          "star_0 " + fmt(pointwise) + ", associativity " + fmt(assoc) + ", tracial " + fmt(tracial) + " (tol 1e-8); direct vs Fourier " +
              fmt(cross) + " (tol 1e-6)"};
}

Outcome generator_bound() {
  constexpr int pairs = 500;
  std::size_t violations = 0;
  int slope_ok = 0;
  double worst_slope = 0.0;
  for (int i = 0; i < pairs; ++i) {
    Rng rng = case_rng(seed ^ 0x8ULL, static_cast<std::uint64_t>(i));
    const Eigen::Index n = uniform_int(rng, 1, 16);
    const HermitianPair pair(random_hermitian(n, rng), random_hermitian(n, rng));
    const double dist = spectral_norm(pair.first() - pair.second());
    std::vector<double> ts;
    for (int k = 0; k < 8; ++k) ts.push_back(uniform_real(rng, -3, 3));
    for (double s : {0.1, 0.5, 1.0}) ts.push_back(s * 0.01 / dist);
    const auto rep = generator_bound_check(pair, ts);
    violations += rep.violations;
    worst_slope = std::max(worst_slope, rep.slope_relative_error);
    if (rep.slope_within_5_percent) ++slope_ok;
  }
  return {violations == 0 && slope_ok == pairs, std::to_string(violations) + " necessity violations, slope within 5% on " +
                                                    std::to_string(slope_ok) + "/" + std::to_string(pairs) +
                                                    ", worst slope error " + fmt(worst_slope)};
}

Outcome w_assembly() {
  constexpr double order_lo = 1.8, order_hi = 2.2;
  auto field = [](double h) {
    return UnitaryFieldSample{[](double x, double y) { return CMatrix(CMatrix::Identity(1, 1) * std::polar(1.0, y * std::atan(x))); },
                              4.0, 4.0, h, 1};
  };
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(3, 3);
  delta(0, 1) = 0.7;
  delta(0, 2) = -0.4;
  delta(1, 2) = 0.9;
  const std::vector<std::vector<double>> pts{{0.3, -0.8, 1.1}, {-1.2, 0.5, 0.7}, {0.9, 1.3, -1.4}};
  const double d1 = assemble_W(field(1e-2), delta, 3, pts).identity_deviation;
  const double d2 = assemble_W(field(5e-3), delta, 3, pts).identity_deviation;
  const double order = std::log2(d1 / d2);
  return {order >= order_lo && order <= order_hi,
          "deviation " + fmt(d1) + " at h=1e-2, " + fmt(d2) + " at h=5e-3, order " + fmt(order) + " (want [1.8, 2.2])"};
}

Outcome fock_clifford() {
  constexpr double tol = 1e-12;
  constexpr int cutoff = 6;
  bool pass = true;
  std::string detail;
  for (int n : {1, 2}) {
    const auto r = fock_identities_check(n, cutoff);
    const bool ok = r.identity_residual <= tol && r.interior_kernel_dim == r.clifford_dim;
    pass = pass && ok;
    detail += "n=" + std::to_string(n) + ": residual " + fmt(r.identity_residual) + " (tol 1e-12), kernel dim " +
              std::to_string(r.interior_kernel_dim) + " vs Clifford dim " + std::to_string(r.clifford_dim) + (n == 1 ? "; " : "");
  }
  return {pass, detail};
}

const std::vector<std::function<Outcome()>> criteria{algebraic_exactness, tensor_construction, constant_audit,
                                                     symplectic_normalization, metric_lower_bound, holder_continuity,
                                                     moyal_engine,       generator_bound,     w_assembly,
                                                     fock_clifford};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  if (argc < 2) {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) which.push_back(i);
  } else {
    for (int a = 1; a < argc; ++a) {
      char* end = nullptr;
      const long v = std::strtol(argv[a], &end, 10);
      if (*end != '\0' || v < 1 || v > static_cast<long>(criteria.size())) {
        std::fprintf(stderr, "usage: acceptance [1-%zu ...]\n", criteria.size());
        return 2;
      }
      which.push_back(static_cast<int>(v));
    }
  }
  bool all = true;
  for (int n : which) {
    Outcome o{false, ""};
    try {
      o = criteria[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", n, o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
