#include <gtest/gtest.h>

#include <cmath>

#include <nctorus/random.hpp>
#include <nctorus/weyl.hpp>

using namespace nct;

namespace {

bool is_permutation(const CMatrix& m, double tol) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    int ones = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double a = std::abs(m(i, j));
      if (std::abs(a - 1.0) <= tol) ++ones;
      else if (a > tol) return false;
    }
    if (ones != 1) return false;
  }
  return true;
}

}  // namespace

TEST(Translation, GridStepIsPermutation) {
  const Grid1D g{32, 4.0};
  const CMatrix u = translation_unitary(g.h(), g);
  EXPECT_TRUE(is_permutation(u, 1e-12));
  // f(x + h) at the node x_n reads the node x_{n+1}
  for (int n = 0; n + 1 < g.M; ++n) EXPECT_NEAR(std::abs(u(n, n + 1)), 1.0, 1e-12);
}

TEST(Translation, ZeroIsIdentity) {
  const Grid1D g{16, 3.0};
  EXPECT_LE((translation_unitary(0.0, g) - CMatrix::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Translation, GroupLawAndUnitarity) {
  const Grid1D g{64, 8.0};
  const CMatrix a = translation_unitary(0.3, g), b = translation_unitary(0.4, g), c = translation_unitary(0.7, g);
  EXPECT_LE((a * b - c).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LE((a.adjoint() * a - CMatrix::Identity(64, 64)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((translation_unitary(-0.3, g) - a.adjoint()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Translation, ShiftsBandLimitedSamples) {
  const Grid1D g{64, 8.0};
  const Eigen::VectorXd x = g.points();
  CVector f(64), shifted(64);
  const double k = 3 * g.dk(), s = 0.37;
  for (int n = 0; n < 64; ++n) {
    f(n) = std::polar(1.0, k * x(n));
    shifted(n) = std::polar(1.0, k * (x(n) + s));
  }
  EXPECT_LE((translation_unitary(s, g) * f - shifted).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Modulation, IdentityInverseAndDiagonal) {
  const Grid1D g{32, 5.0};
  const CMatrix i = CMatrix::Identity(32, 32);
  EXPECT_LE((modulation_unitary(0.0, g) - i).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((modulation_unitary(1.0, g) * modulation_unitary(-1.0, g) - i).cwiseAbs().maxCoeff(), 1e-15);
  const CMatrix v = modulation_unitary(1.0, g);
  const Eigen::VectorXd x = g.points();
  for (int n = 0; n < 32; ++n) EXPECT_LE(std::abs(v(n, n) - std::exp(cplx(0, x(n)))), 1e-15);
  EXPECT_LE((modulation_unitary(0.3, g) * modulation_unitary(0.4, g) - modulation_unitary(0.7, g)).cwiseAbs().maxCoeff(),
            1e-13);
}

TEST(WeylResidual, ZeroTheta) {
  const auto r = weyl_residual(0.0, 0.8, 0.5, Grid1D{32, 4.0});
  EXPECT_LE(r.residual, 1e-13);
  EXPECT_LE(r.operator_residual, 1e-13);
}

TEST(WeylResidual, Commensurate) {
  const Grid1D g = Grid1D::symmetric(64);
  const auto r = weyl_residual(1.0, g.dk(), g.h(), g);
  EXPECT_TRUE(r.commensurate);
  EXPECT_LE(r.operator_residual, 1e-12);
  EXPECT_LE(r.residual, 1e-12);
  const auto r2 = weyl_residual(1.0, 3 * g.dk(), 2 * g.h(), g);
  EXPECT_TRUE(r2.commensurate);
  EXPECT_LE(r2.operator_residual, 1e-12);
}

TEST(WeylResidual, IncommensurateFlagged) {
  const Grid1D g = Grid1D::symmetric(64);
  const auto r = weyl_residual(1.0, 0.37, 0.37, g);
  EXPECT_FALSE(r.commensurate);
  EXPECT_GT(r.operator_residual, 1e-3);
}

TEST(WeylResidual, RefinementDecreases) {
  const auto st = weyl_refinement_study(1.0, 0.37, 0.37, {64, 128, 256});
  ASSERT_EQ(st.residuals.size(), 3u);
  EXPECT_TRUE(st.decreasing_or_floor);
  for (std::size_t i = 1; i < st.residuals.size(); ++i) {
    if (st.residuals[i - 1] > 1e-13) {
      EXPECT_LT(st.residuals[i], st.residuals[i - 1]);
      EXPECT_GE(st.orders[i - 1], 1.0);
    } else {
      EXPECT_LE(st.residuals[i], 1e-13);
    }
  }
}

TEST(GeneratorBound, CommutingDiagonal) {
  const double eps = 0.2;
  CMatrix p2 = CMatrix::Zero(2, 2);
  p2(0, 0) = eps;
  p2(1, 1) = -eps;
  const std::vector<double> ts{-2.0, -0.5, 0.0, 0.01, 0.03, 0.05, 1.0, 4.0};
  const auto r = generator_bound_check(HermitianPair(CMatrix::Zero(2, 2), p2), ts);
  EXPECT_NEAR(r.generator_distance, eps, 1e-12);
  EXPECT_TRUE(r.necessity_holds);
  // at t = 4 the gap is eps |t| - |e^{i eps t} - 1|
  const double t = 4.0, gap = eps * t - std::abs(std::exp(cplx(0, eps * t)) - 1.0);
  EXPECT_LE(r.necessity_margin, gap + 1e-12);
  EXPECT_GE(r.necessity_margin, -1e-12);
  EXPECT_TRUE(r.slope_within_5_percent);
}

TEST(GeneratorBound, EqualPair) {
  Rng rng(11);
  const CMatrix p = random_hermitian(5, rng);
  const auto r = generator_bound_check(HermitianPair(p, p), {0.0, 0.001, 1.0, 10.0});
  EXPECT_EQ(r.generator_distance, 0.0);
  EXPECT_EQ(r.slope, 0.0);
  EXPECT_TRUE(r.necessity_holds);
  EXPECT_TRUE(r.slope_within_5_percent);
}

TEST(GeneratorBound, RandomUnitDistance) {
  Rng rng(2024);
  const CMatrix p = random_hermitian(6, rng);
  CMatrix d = random_hermitian(6, rng);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(d);
  d /= es.eigenvalues().cwiseAbs().maxCoeff();
  const HermitianPair pair(p, p + d);
  std::vector<double> ts;
  for (int i = 1; i <= 10; ++i) ts.push_back(1e-3 * i);
  for (double t : {-3.0, -1.0, 0.5, 2.0, 7.0}) ts.push_back(t);
  const auto r = generator_bound_check(pair, ts);
  EXPECT_NEAR(r.generator_distance, 1.0, 1e-9);
  EXPECT_GE(r.slope, 0.95);
  EXPECT_LE(r.slope, 1.0 + 1e-9);
  EXPECT_TRUE(r.necessity_holds);
}

TEST(GeneratorBound, RandomNecessity) {
  std::size_t violations = 0;
  for (int i = 0; i < 500; ++i) {
    Rng rng = case_rng(77, static_cast<std::uint64_t>(i));
    const Eigen::Index n = uniform_int(rng, 1, 8);
    const HermitianPair pair(random_hermitian(n, rng), random_hermitian(n, rng));
    std::vector<double> ts;
    for (int k = 0; k < 6; ++k) ts.push_back(uniform_real(rng, -5, 5));
    violations += generator_bound_check(pair, ts).violations;
  }
  EXPECT_EQ(violations, 0u);
}

TEST(GeneratorBound, Guards) {
  EXPECT_THROW(generator_bound_check(HermitianPair(CMatrix::Zero(2, 2), CMatrix::Zero(2, 2)), {}), rejected_input);
  CMatrix nh = CMatrix::Zero(2, 2);
  nh(0, 1) = 1.0;
  EXPECT_THROW(HermitianPair(nh, nh), rejected_input);
  EXPECT_THROW(HermitianPair(CMatrix::Zero(2, 2), CMatrix::Zero(3, 3)), rejected_input);
}

namespace {

UnitaryFieldSample arctan_field(double h) {
  return {[](double x, double y) { return CMatrix(CMatrix::Identity(1, 1) * std::polar(1.0, y * std::atan(x))); }, 4.0, 4.0, h,
          1};
}

Eigen::MatrixXd coupling3() {
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(3, 3);
  delta(0, 1) = 0.7;
  delta(0, 2) = -0.4;
  delta(1, 2) = 0.9;
  return delta;
}

const std::vector<std::vector<double>> points3{{0.3, -0.8, 1.1}, {-1.2, 0.5, 0.7}, {0.9, 1.3, -1.4}};

}  // namespace

TEST(AssembleW, ConstantField) {
  CMatrix c(2, 2);
  c << 0, 1, 1, 0;
  const UnitaryFieldSample w{[c](double, double) { return c; }, 3.0, 3.0, 1e-3, 2};
  const auto r = assemble_W(w, coupling3(), 3, points3);
  EXPECT_LE(r.identity_deviation, 1e-9);
  EXPECT_LE(r.chain_rule_deviation, 1e-9);
  EXPECT_LE(r.unitarity_residual, 1e-12);
  EXPECT_TRUE(r.assembly_holds);
}

TEST(AssembleW, ArctanPhaseAgainstSymbolicDerivative) {
  const auto w = arctan_field(1e-3);
  const auto delta = coupling3();
  const auto r = assemble_W(w, delta, 3, points3);
  EXPECT_LE(r.identity_deviation, 1e-4);
  EXPECT_LE(r.unitarity_residual, 1e-12);
  EXPECT_TRUE(r.assembly_holds);
  // w_j = exp(i x_j sum_{k<j} delta_kj atan(x_k)), so both sides of the identity equal
  // i sum_{k<j} delta_kj (atan(x_k) - x_k) w_j
  for (const auto& x : points3)
    for (int j = 1; j < 3; ++j) {
      double phase = 0.0, rate = 0.0, shift = 0.0;
      for (int k = 0; k < j; ++k) {
        phase += delta(k, j) * std::atan(x[k]);
        rate += delta(k, j) * (std::atan(x[k]) - x[k]);
        shift += delta(k, j) * x[k];
      }
      auto wj = [&](double xj) { return std::polar(1.0, xj * phase); };
      const double h = w.h;
      const cplx fd = (wj(x[j] + h) - wj(x[j] - h)) / (2 * h) - cplx(0, 1) * shift * wj(x[j]);
      EXPECT_LE(std::abs(fd - cplx(0, rate) * wj(x[j])), 1e-5);
    }
}

TEST(AssembleW, SecondOrderInStep) {
  const double d1 = assemble_W(arctan_field(1e-2), coupling3(), 3, points3).identity_deviation;
  const double d2 = assemble_W(arctan_field(5e-3), coupling3(), 3, points3).identity_deviation;
  const double order = std::log2(d1 / d2);
  EXPECT_GE(order, 1.8);
  EXPECT_LE(order, 2.2);
}

TEST(AssembleW, DecoupledCommutingFactors) {
  CMatrix a(2, 2);
  a << 0.5, cplx(0, 0.3), cplx(0, -0.3), -0.2;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  const UnitaryFieldSample w{[es](double x, double y) {
                               CVector ph(2);
                               for (int i = 0; i < 2; ++i) ph(i) = std::polar(1.0, (x + y) * es.eigenvalues()(i));
                               return CMatrix(es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint());
                             },
                             3.0, 3.0, 1e-4, 2};
  const auto r = assemble_W(w, Eigen::MatrixXd::Zero(4, 4), 4, {{0.2, -0.6, 1.0, 0.4}, {-1.1, 0.3, 0.8, -0.9}});
  EXPECT_LE(r.identity_deviation, 1e-9);
  EXPECT_TRUE(r.assembly_holds);
  // factors commute and move in the same direction, so the triangle inequality is tight
  EXPECT_LE(std::abs(r.assembly_slack), 1e-6);
  EXPECT_LE(r.unitarity_residual, 1e-12);
}

TEST(AssembleW, Guards) {
  const auto w = arctan_field(1e-3);
  EXPECT_THROW(assemble_W(w, coupling3(), 1, {{0.0}}), rejected_input);
  EXPECT_THROW(assemble_W(w, coupling3(), 3, {{0.0, 0.0}}), rejected_input);
  EXPECT_THROW(assemble_W(w, coupling3(), 3, {{0.0, 0.0, 4.5}}), rejected_input);
  EXPECT_THROW(assemble_W(w, Eigen::MatrixXd::Zero(2, 2), 3, points3), rejected_input);
}

TEST(GammaLevel, Enumeration) {
  const GammaLevel g0(1, 0);
  EXPECT_EQ(g0.count(), 3);
  std::vector<Rational> v(g0.begin(), g0.end());
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v.front(), Rational(-1));
  EXPECT_EQ(v.back(), Rational(1));

  const GammaLevel g(3, 2);
  EXPECT_EQ(g.denominator(), 9);
  EXPECT_EQ(g.count(), 2 * 27 + 1);
  EXPECT_EQ(g.spacing(), Rational(1, 9));
  Rational prev(-100);
  std::int64_t n = 0;
  for (const Rational r : g) {
    EXPECT_LT(prev, r);
    prev = r;
    ++n;
  }
  EXPECT_EQ(n, g.count());
  EXPECT_EQ(prev, Rational(3));
  EXPECT_THROW(GammaLevel(0, 1), rejected_input);
  EXPECT_THROW(GammaLevel(1000, 10), rejected_input);
}

TEST(Audit, PaperArithmetic) {
  const auto r = audit_interpolation_constants(8100, 2500);
  ASSERT_TRUE(r.step_exact.has_value());
  EXPECT_EQ(*r.step_exact, Rational(2474));
  EXPECT_EQ(r.slack, 26.0);
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.levels_hold);
  ASSERT_EQ(r.interior_levels.size(), 6u);
  EXPECT_DOUBLE_EQ(r.interior_levels[0], 2474.0);
  EXPECT_DOUBLE_EQ(r.unit_levels[0], 1224.0 + 4.5);
  EXPECT_DOUBLE_EQ(r.fixed_point, 2448.0);
}

TEST(Audit, SmallKFails) {
  const auto r = audit_interpolation_constants(100, 2500);
  EXPECT_FALSE(r.holds);
  EXPECT_EQ(*r.step_exact, Rational(1224 + 11250));
  EXPECT_FALSE(r.levels_hold);
  EXPECT_TRUE(std::isinf(r.fixed_point));
}

TEST(Audit, LargeKLimit) {
  const auto r = audit_interpolation_constants(1'000'000'000'000LL, 2500);
  EXPECT_NEAR(r.step_value, 1224.0, 0.2);
  EXPECT_NEAR(r.fixed_point, 1224.0, 0.1);
  const auto irr = audit_interpolation_constants(8101, 2500.5);
  EXPECT_FALSE(irr.step_exact.has_value());
  EXPECT_NEAR(irr.step_value, 1224.0 + 2500.5 * 45.0 / std::sqrt(8101.0), 1e-9);
  EXPECT_THROW(audit_interpolation_constants(0, 1), rejected_input);
}
