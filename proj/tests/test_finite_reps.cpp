#include <gtest/gtest.h>

#include "nctorus/finite_reps.hpp"
#include "nctorus/random.hpp"

using namespace nct;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(ClockShift, TwoByTwo) {
  const auto t = clock_shift(1, 2);
  CMatrix u(2, 2), v(2, 2);
  u << 1, 0, 0, -1;
  v << 0, 1, 1, 0;
  EXPECT_LE(max_abs(t[0] - u), 1e-16);
  EXPECT_LE(max_abs(t[1] - v), 0.0);
  EXPECT_LE(max_abs(t[0] * t[1] + t[1] * t[0]), 1e-16);
}

TEST(ClockShift, FourByFourByHand) {
  const auto t = clock_shift(1, 4);
  const cplx I(0, 1);
  CMatrix u = CMatrix::Zero(4, 4), v = CMatrix::Zero(4, 4);
  u.diagonal() << 1.0, I, -1.0, -I;
  v(1, 0) = v(2, 1) = v(3, 2) = v(0, 3) = 1.0;
  EXPECT_LE(max_abs(t[0] - u), 1e-15);
  EXPECT_LE(max_abs(t[1] - v), 0.0);
  EXPECT_LE(max_abs(u * v - I * v * u), 0.0);
  const auto r = verify_relations(t);
  EXPECT_LE(r.commutation_residual, 1e-15);
  EXPECT_LE(r.unitarity_residual, 1e-15);
}

TEST(ClockShift, CommutingAndGuards) {
  const auto r = verify_relations(clock_shift(0, 3));
  EXPECT_EQ(r.commutation_residual, 0.0);
  EXPECT_THROW(clock_shift(1, 0), rejected_input);
}

TEST(VerifyRelations, DetectsPerturbedSigma) {
  const auto t = clock_shift(1, 4);
  CMatrix s = t.sigma();
  s(0, 1) *= std::polar(1.0, 1e-3);
  s(1, 0) = std::conj(s(0, 1));
  const UnitaryTuple bad(t.matrices(), s, 1e-2);
  const auto r = verify_relations(bad);
  EXPECT_NEAR(r.commutation_residual, 1e-3, 1e-6);
  EXPECT_EQ(r.worst_pair, std::make_pair(0, 1));
  EXPECT_FALSE(r.within(1e-12));
}

TEST(VerifyRelations, SingleGeneratorIsVacuous) {
  const auto t = identity_tuple(1, 3);
  const auto r = verify_relations(t);
  EXPECT_EQ(r.commutation_residual, 0.0);
  EXPECT_EQ(r.worst_pair, std::make_pair(-1, -1));
}

TEST(VerifyRelations, DetectsNonUnitary) {
  auto m = clock_shift(1, 3).matrices();
  m[1] *= 1.5;
  const UnitaryTuple t(m, clock_shift(1, 3).sigma());
  const auto r = verify_relations(t);
  EXPECT_NEAR(r.unitarity_residual, 1.25, 1e-12);
  EXPECT_EQ(r.worst_generator, 1);
}

TEST(TensorConstruct, IdentityPairsInThreeGenerators) {
  PairTable p;
  for (int j = 0; j < 3; ++j)
    for (int k = j + 1; k < 3; ++k) p.emplace(std::make_pair(j, k), clock_shift(1, 2));
  const auto t = tensor_construct(3, p);
  ASSERT_EQ(t.size(), 8);
  for (int j = 0; j < 3; ++j)
    for (int k = j + 1; k < 3; ++k) EXPECT_LE(max_abs(t[j] * t[k] + t[k] * t[j]), 1e-14);
  EXPECT_LE(verify_relations(t).commutation_residual, 1e-14);
}

TEST(TensorConstruct, BaseCaseReturnsPair) {
  PairTable p;
  p.emplace(std::make_pair(0, 1), clock_shift(2, 5));
  const auto t = tensor_construct(2, p);
  EXPECT_LE(max_abs(t[0] - clock_shift(2, 5)[0]), 0.0);
  EXPECT_LE(max_abs(t[1] - clock_shift(2, 5)[1]), 0.0);
}

TEST(TensorConstruct, FourGeneratorsOverThirds) {
  PairTable p;
  for (int j = 0; j < 4; ++j)
    for (int k = j + 1; k < 4; ++k) p.emplace(std::make_pair(j, k), clock_shift(1, 3));
  const auto t = tensor_construct(4, p);
  EXPECT_EQ(t.size(), 729);
  const auto r = verify_relations(t);
  EXPECT_LE(r.commutation_residual, 1e-13);
  EXPECT_LE(r.unitarity_residual, 1e-13);
  const cplx w = std::polar(1.0, two_pi / 3);
  for (int j = 0; j < 4; ++j)
    for (int k = j + 1; k < 4; ++k) EXPECT_NEAR(std::abs(t.sigma()(j, k) - w), 0.0, 1e-15);
}

TEST(TensorConstruct, Guards) {
  PairTable p;
  p.emplace(std::make_pair(0, 1), clock_shift(1, 2));
  EXPECT_THROW(tensor_construct(3, p), rejected_input);
  PairTable big;
  for (int j = 0; j < 4; ++j)
    for (int k = j + 1; k < 4; ++k) big.emplace(std::make_pair(j, k), clock_shift(1, 5));
  EXPECT_THROW(tensor_construct(4, big), size_cap_exceeded);
}

TEST(TensorTranslate, PhasesMultiply) {
  const auto t = tensor_translate(clock_shift(1, 2), clock_shift(1, 2));
  EXPECT_EQ(t.size(), 4);
  EXPECT_LE(max_abs(t[0] * t[1] - t[1] * t[0]), 1e-15);
  const auto s = tensor_translate(clock_shift(1, 3), clock_shift(1, 4));
  EXPECT_NEAR(std::abs(s.sigma()(0, 1) - std::polar(1.0, two_pi * 7.0 / 12.0)), 0.0, 1e-15);
  EXPECT_LE(verify_relations(s).commutation_residual, 1e-14);
  const auto a = clock_shift(2, 7);
  EXPECT_LE(max_abs(tensor_translate(a, identity_tuple(2, 3)).sigma() - a.sigma()), 0.0);
  EXPECT_THROW(tensor_translate(a, identity_tuple(3, 2)), rejected_input);
}

TEST(LowerBound, SpecExamples) {
  const auto a = clock_shift(1, 2);
  const auto same = distance_lower_bound_check(a, a);
  EXPECT_TRUE(same.holds);
  EXPECT_EQ(same.slack, 0.0);
  Rng rng = case_rng(3, 0);
  const auto conj = distance_lower_bound_check(a, conjugate(a, random_unitary(2, rng)));
  EXPECT_TRUE(conj.holds);
  EXPECT_NEAR(conj.bound, 0.0, 1e-15);
  auto [pa, pb] = pad_to_common(a, clock_shift(1, 4));
  ASSERT_EQ(pa.size(), 4);
  const auto r = distance_lower_bound_check(pa, pb);
  EXPECT_TRUE(r.holds);
  EXPECT_GT(r.slack, 0.0);
  // |(-1) - i| = sqrt 2, so the bound is sqrt(sqrt 2) / 2
  EXPECT_NEAR(r.bound, 0.5 * std::pow(2.0, 0.25), 1e-15);
  EXPECT_THROW(distance_lower_bound_check(a, clock_shift(1, 3)), rejected_input);
}

TEST(LowerBound, RandomPairsNeverViolate) {
  for (int i = 0; i < 100; ++i) {
    Rng rng = case_rng(4, static_cast<std::uint64_t>(i));
    const long long q1 = uniform_int(rng, 1, 6), q2 = uniform_int(rng, 1, 6);
    auto [a, b] = pad_to_common(clock_shift(uniform_int(rng, 0, q1 - 1), q1), clock_shift(uniform_int(rng, 0, q2 - 1), q2));
    b = conjugate(b, random_unitary(b.size(), rng));
    const auto r = distance_lower_bound_check(a, b);
    EXPECT_TRUE(r.holds) << "case " << i << " slack " << r.slack;
  }
}

TEST(CyclicGns, MatchesTorusRelations) {
  const SkewMatrix th(3, std::vector<Rational>{Rational(1, 4), Rational(1, 2), Rational(3, 4)});
  const auto t = cyclic_gns_tuple(th, 4);
  EXPECT_EQ(t.size(), 64);
  EXPECT_LE(verify_relations(t).commutation_residual, 1e-13);
  EXPECT_THROW(cyclic_gns_tuple(th, 3), rejected_input);
  EXPECT_THROW(cyclic_gns_tuple(SkewMatrix(2, std::vector<double>{0.3}), 3), rejected_input);
}

TEST(Clifford, SmallSets) {
  const auto one = clifford_generators(1);
  ASSERT_EQ(one.matrices.size(), 1U);
  EXPECT_LE(max_abs(one.matrices[0] * one.matrices[0] - CMatrix::Identity(2, 2)), 0.0);
  EXPECT_TRUE(one.matrices[0].isApprox(one.matrices[0].adjoint()));
  const auto two = clifford_generators(2);
  EXPECT_EQ(two.size(), 2);
  const CMatrix& c1 = two.matrices[0];
  const CMatrix& c2 = two.matrices[1];
  EXPECT_LE(max_abs(c1 * c2 + c2 * c1), 0.0);
  EXPECT_LE(max_abs(c2 * c2 - CMatrix::Identity(2, 2)), 0.0);
  const auto three = clifford_generators(3);
  EXPECT_EQ(three.size(), 4);
  int checks = 0;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      CMatrix x = three.matrices[j] * three.matrices[k] + three.matrices[k] * three.matrices[j];
      if (j == k) x -= 2.0 * CMatrix::Identity(4, 4);
      EXPECT_LE(max_abs(x), 0.0);
      ++checks;
    }
  EXPECT_EQ(checks, 9);
  EXPECT_EQ(clifford_generators(8).anticommutator_residual(), 0.0);
  EXPECT_THROW(clifford_generators(0), rejected_input);
  EXPECT_THROW(clifford_generators(13), rejected_input);
}

TEST(Fock, LadderOnInterior) {
  const CMatrix a = truncated_annihilation(2);
  const CMatrix aas = a * a.adjoint(), asa = a.adjoint() * a;
  for (int m = 0; m < 2; ++m) {
    EXPECT_NEAR(aas(m, m).real(), m + 1.0, 1e-15);
    EXPECT_NEAR(asa(m, m).real(), m, 1e-15);
  }
  EXPECT_NEAR(asa(2, 2).real(), 2.0, 1e-15);
}

TEST(Fock, SingleModeIdentities) {
  const auto r = fock_identities_check(1, 6);
  EXPECT_LE(r.number_residual, 1e-12);
  EXPECT_LE(r.identity_residual, 1e-12);
  EXPECT_EQ(r.interior_kernel_dim, r.clifford_dim);
  EXPECT_EQ(r.clifford_dim, 2);
}

TEST(Fock, TwoModeResidualsAreStructural) {
  // The cross terms c_1 c_2 (x) (a_1 a_2^* - a_2 a_1^*) do not cancel for n = 2,
  // so the residual is a fixed O(cutoff) quantity, not rounding.
  const auto r4 = fock_identities_check(2, 4);
  EXPECT_LE(r4.number_residual, 1e-12);
  EXPECT_NEAR(r4.identity_residual, std::sqrt(24.0), 1e-9);
  EXPECT_EQ(r4.interior_kernel_dim, 8);
  const auto r2 = fock_identities_check(2, 2);
  EXPECT_NEAR(r2.identity_residual, 2.0, 1e-9);
  EXPECT_EQ(r2.interior_kernel_dim, 4);
  EXPECT_THROW(fock_identities_check(3, 20), size_cap_exceeded);
}
