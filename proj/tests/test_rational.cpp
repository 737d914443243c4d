#include <gtest/gtest.h>

#include "nctorus/rational.hpp"
#include "nctorus/skew_matrix.hpp"

using nct::Rational;
using nct::SkewMatrix;

TEST(Rational, ReducesAndNormalizesSign) {
  const Rational r(6, -8);
  EXPECT_EQ(r.num(), -3);
  EXPECT_EQ(r.den(), 4);
  EXPECT_EQ(Rational(0, 5), Rational(0));
  EXPECT_THROW(Rational(1, 0), nct::rejected_input);
}

TEST(Rational, ArithmeticIsExact) {
  EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
  EXPECT_EQ(Rational(2, 3) * Rational(9, 4), Rational(3, 2));
  EXPECT_EQ(Rational(1, 2) - Rational(3, 4), Rational(-1, 4));
  EXPECT_EQ(Rational(1, 2) / Rational(1, 4), Rational(2));
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
}

TEST(Rational, FractionalParts) {
  EXPECT_EQ(Rational(7, 4).frac(), Rational(3, 4));
  EXPECT_EQ(Rational(-1, 4).frac(), Rational(3, 4));
  EXPECT_EQ(Rational(3, 4).centered(), Rational(-1, 4));
  EXPECT_EQ(Rational(1, 2).centered(), Rational(1, 2));
}

TEST(Rational, ParseAndPrint) {
  EXPECT_EQ(Rational::parse("3/12"), Rational(1, 4));
  EXPECT_EQ(Rational::parse("-5"), Rational(-5));
  EXPECT_EQ(Rational(-2, 6).str(), "-1/3");
  EXPECT_THROW(Rational::parse("1/"), nct::rejected_input);
  EXPECT_THROW(Rational::parse("x"), nct::rejected_input);
}

TEST(Rational, OverflowIsDetected) {
  const Rational big(std::int64_t{1} << 62, 1);
  EXPECT_THROW(big * big, std::overflow_error);
}

TEST(SkewMatrix, UpperTriangleLayout) {
  const SkewMatrix t(3, std::vector<double>{0.1, 0.2, 0.3});
  EXPECT_DOUBLE_EQ(t(0, 1), 0.1);
  EXPECT_DOUBLE_EQ(t(0, 2), 0.2);
  EXPECT_DOUBLE_EQ(t(1, 2), 0.3);
  EXPECT_DOUBLE_EQ(t(2, 1), -0.3);
  EXPECT_DOUBLE_EQ(t(1, 1), 0.0);
  EXPECT_FALSE(t.is_rational());
}

TEST(SkewMatrix, ExactEntriesSurvive) {
  const SkewMatrix t(2, std::vector<Rational>{Rational(1, 3)});
  ASSERT_TRUE(t.is_rational());
  EXPECT_EQ(t.exact(0, 1), Rational(1, 3));
  EXPECT_EQ(t.exact(1, 0), Rational(-1, 3));
}

TEST(SkewMatrix, RejectsNonSkew) {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 0.5, 0;
  EXPECT_THROW(SkewMatrix::from_matrix(a), nct::rejected_input);
  EXPECT_THROW(SkewMatrix(3, std::vector<double>{1.0}), nct::rejected_input);
}
