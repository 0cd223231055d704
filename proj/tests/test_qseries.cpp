#include <gtest/gtest.h>

#include "jordan/series.hpp"
#include "support.hpp"

using namespace jordan;
using jordan::test::random_series;
using jordan::test::zpow;

namespace {

Series z(int order) { return zpow(1, 1, order); }

}  // namespace

TEST(Rational, CanonicalForm) {
  Rational q = parse_rational("-6/4");
  EXPECT_EQ(q.get_num(), -3);
  EXPECT_EQ(q.get_den(), 2);
  Rational zero = parse_rational("0/7");
  EXPECT_EQ(zero.get_den(), 1);
  EXPECT_THROW(parse_rational("1/0"), Error);
  EXPECT_THROW(parse_rational("abc"), Error);
  EXPECT_THROW(parse_rational("6/-4"), Error);
}

TEST(SeriesMul, DifferenceOfSquares) {
  const int n = 2;
  Series a = Series::one(n) + z(n), b = Series::one(n) - z(n);
  EXPECT_EQ(series_mul(a, b), Series::one(n) - zpow(1, 2, n));
}

TEST(SeriesMul, TruncatesBeyondOrder) {
  const int n = 1;
  Series a = zpow(2, 1, n);
  EXPECT_TRUE(series_mul(a, a).is_zero());
}

TEST(SeriesMul, ScalarImageOfExponentialQuotient) {
  // (e^{2z} - 1)/z = sum 2^n z^{n-1}/n!, built term by term.
  const int n = 2;
  Series num(n + 1);
  for (int k = 1; k <= n + 1; ++k) num += zpow(rational_pow(2, k) / factorial(k), k, n + 1);
  Series quotient = num.shift_down(1).truncated(n);
  EXPECT_EQ(quotient, zpow(2, 0, n) + zpow(2, 1, n) + zpow(Rational(4, 3), 2, n));
}

TEST(SeriesAdd, MismatchedOrdersRejected) {
  try {
    (void)series_add(Series::one(2), Series::one(3));
    FAIL() << "expected OrderMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OrderMismatch);
  }
  EXPECT_THROW((void)series_mul(Series::one(1), Series::one(4)), Error);
}

TEST(SeriesInverse, Identity) {
  for (int n : {0, 1, 4}) EXPECT_EQ(series_inverse(Series::one(n)), Series::one(n));
}

TEST(SeriesInverse, GeometricSeries) {
  const int n = 3;
  Series a = Series::one(n) - zpow(2, 1, n);
  Series expected(n);
  for (int k = 0; k <= n; ++k) expected += zpow(rational_pow(2, k), k, n);
  EXPECT_EQ(series_inverse(a), expected);
}

TEST(SeriesInverse, Constant) {
  EXPECT_EQ(series_inverse(Series::constant(2, 3)), Series::constant(Rational(1, 2), 3));
}

TEST(SeriesInverse, ZeroConstantTermIsNotAUnit) {
  try {
    (void)series_inverse(z(3));
    FAIL() << "expected NotAUnit";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAUnit);
  }
}

TEST(EpsLimit, PositivePowersVanish) {
  const int n = 2;
  EpsSeries a = EpsSeries::from_series(Series::one(n) + z(n), 0) + EpsSeries::from_series(z(n), 1);
  EXPECT_EQ(eps_limit(a), Series::one(n) + z(n));
}

TEST(EpsLimit, NegativePowerDiverges) {
  EpsSeries a = EpsSeries::from_series(z(2), -1);
  try {
    (void)eps_limit(a);
    FAIL() << "expected DivergentContraction";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DivergentContraction);
    EXPECT_EQ(e.detail(), -1);
  }
}

TEST(EpsLimit, ContractedExponentialQuotientIsFinite) {
  // (eps/2) (e^{2 z_old X} - 1)/z_old with z_old = eps z / 2 and X = P/eps.
  // Scalar part per power of P: 2^{k-1} z_old^{k-1} eps^{1-k} / k! = z^{k-1} / k!.
  const int n = 3;
  EpsSeries total = EpsSeries::zero(n);
  for (int k = 1; k <= n + 1; ++k) {
    EpsSeries zold_pow = EpsSeries::from_series(zpow(rational_pow(Rational(1, 2), k - 1), k - 1, n), k - 1);
    EpsSeries scaled = zold_pow * Rational(rational_pow(2, k - 1) / factorial(k));
    EpsSeries with_eps = scaled * EpsSeries::from_series(Series::one(n), 1 - k);
    Series lim = eps_limit(with_eps);
    EXPECT_EQ(lim, zpow(Rational(1) / factorial(k), k - 1, n)) << "power " << k;
    total += with_eps;
  }
  EXPECT_NO_THROW((void)eps_limit(total));
}

class SeriesRing : public ::testing::TestWithParam<int> {};

TEST_P(SeriesRing, AssociativeAndDistributive) {
  const int n = GetParam();
  std::mt19937 rng(1234 + n);
  for (int trial = 0; trial < 25; ++trial) {
    Series a = random_series(rng, n), b = random_series(rng, n), c = random_series(rng, n);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ((a + b) * c, a * c + b * c);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(a + (-a), Series::zero(n));
  }
}

TEST_P(SeriesRing, InverseRoundTrip) {
  const int n = GetParam();
  std::mt19937 rng(99 + n);
  for (int trial = 0; trial < 25; ++trial) {
    Series a = random_series(rng, n, true);
    EXPECT_EQ(a * series_inverse(a), Series::one(n));
  }
}

TEST_P(SeriesRing, EpsLimitLinearAndMultiplicative) {
  const int n = GetParam();
  std::mt19937 rng(7 + n);
  std::uniform_int_distribution<int> deg(0, 2);
  for (int trial = 0; trial < 25; ++trial) {
    EpsSeries a = EpsSeries::from_series(random_series(rng, n), deg(rng)) +
                  EpsSeries::from_series(random_series(rng, n), deg(rng));
    EpsSeries b = EpsSeries::from_series(random_series(rng, n), deg(rng));
    EXPECT_EQ(eps_limit(a + b), eps_limit(a) + eps_limit(b));
    EXPECT_EQ(eps_limit(a * b), eps_limit(a) * eps_limit(b));
    EXPECT_EQ(eps_limit(a * Rational(3, 2)), eps_limit(a) * Rational(3, 2));
  }
}

INSTANTIATE_TEST_SUITE_P(Orders, SeriesRing, ::testing::Values(1, 2, 4));
