#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hqlab/overestimation.hpp"
#include "hqlab/penalty.hpp"
#include "oracles.hpp"

using hqlab::OverestimationQuery;

TEST(Threshold, Values) {
  EXPECT_EQ(hqlab::threshold({100, 3, 0.0}), 0.0);
  EXPECT_NEAR(hqlab::threshold({1e6, 1, 2.0}), 1.0, 1e-3);
  // 100 (1 - exp(-ln(100) / 100)), evaluated independently with expm1 in Python
  EXPECT_NEAR(hqlab::threshold({100, 2, std::log(100.0)}), 4.500741397856405, 1e-12);
}

TEST(Threshold, NoCancellationForTinyExponent) {
  // first-order expansion dk d_n / 2 is exact to O(x^2 / n)
  const double t = hqlab::threshold({1e15, 1, 2.0});
  EXPECT_NEAR(t, 1.0, 1e-12);
}

TEST(OverestimationProbability, Values) {
  EXPECT_EQ(hqlab::overestimation_probability({100, 1, 0.0}), 1.0);
  EXPECT_NEAR(hqlab::overestimation_probability({1e6, 1, 2.0}), 0.3173, 1e-4);
  EXPECT_NEAR(hqlab::overestimation_probability({1e6, 2, 2.0}), std::exp(-1.0), 1e-6);
  // threshold t for dk = 2 has survival exp(-t/2)
  const double t = hqlab::threshold({100, 2, std::log(100.0)});
  EXPECT_NEAR(hqlab::overestimation_probability({100, 2, std::log(100.0)}), std::exp(-t / 2), 1e-13);
  EXPECT_NEAR(hqlab::overestimation_probability({100, 2, std::log(100.0)}), 0.10536016042325036, 1e-12);
}

TEST(OverestimationProbability, AgreesWithQuadratureOracle) {
  for (int dk : {1, 2, 3}) {
    for (double n : {50.0, 2000.0, 1e5}) {
      for (double d : {1.0, 2.0, std::log(n)}) {
        const OverestimationQuery q{n, dk, d};
        EXPECT_NEAR(hqlab::overestimation_probability(q), 1.0 - oracle::chi2_cdf_quadrature(dk, hqlab::threshold(q)), 1e-9);
      }
    }
  }
}

TEST(OverestimationProbability, MonotoneAndInterior) {
  for (int dk : {1, 2, 4}) {
    double prev = 1.0;
    for (double d = 0.1; d < 30; d += 0.1) {
      const double p = hqlab::overestimation_probability({1000, dk, d});
      EXPECT_LE(p, prev);
      EXPECT_GT(p, 0.0);
      EXPECT_LT(p, 1.0);
      prev = p;
    }
    prev = 1.0;
    const auto bic = hqlab::PenaltySequence::bic();
    for (double n = 10; n < 1e7; n *= 1.5) {
      const double p = hqlab::overestimation_probability({n, dk, bic.evaluate(n)});
      EXPECT_LE(p, prev);
      prev = p;
    }
  }
}

TEST(ThresholdBounds, Values) {
  const auto zero = hqlab::threshold_bounds({100, 1, 0.0});
  EXPECT_EQ(zero.lower, 0.0);
  EXPECT_EQ(zero.upper, 0.0);
  const auto b = hqlab::threshold_bounds({100, 2, std::log(100.0)});
  EXPECT_NEAR(b.upper, std::log(100.0), 1e-14);
  EXPECT_NEAR(b.lower, 4.393094262, 1e-9);
  const double t = hqlab::threshold({100, 2, std::log(100.0)});
  EXPECT_LT(b.lower, t);
  EXPECT_LT(t, b.upper);
}

TEST(ThresholdBounds, BracketRandomQueries) {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> logn(0.0, 14.0), dn(0.0, 40.0);
  std::uniform_int_distribution<int> dks(1, 10);
  for (int i = 0; i < 10000; ++i) {
    const OverestimationQuery q{std::floor(std::exp(logn(gen))) + 1.0, dks(gen), dn(gen)};
    const auto b = hqlab::threshold_bounds(q);
    const double t = hqlab::threshold(q);
    EXPECT_LE(b.lower, t * (1 + 1e-12) + 1e-12);
    EXPECT_LE(t, b.upper * (1 + 1e-12) + 1e-12);
  }
}

TEST(ThresholdBounds, HannanQuinnLowerBoundBeatsBandAtLargeN) {
  const auto hq = hqlab::PenaltySequence::hannan_quinn(1.5);
  const double n = 1e4;
  const auto b = hqlab::threshold_bounds({n, 1, hq.evaluate(n)});
  EXPECT_GT(b.lower / std::log(std::log(n)), 1.0);
}

TEST(LilBand, Values) {
  const double ee = std::exp(std::exp(1.0));
  EXPECT_NEAR(hqlab::lil_band(ee, 1), 1.0, 1e-14);
  EXPECT_NEAR(hqlab::lil_band(ee, 3), 3.0, 1e-14);
  EXPECT_NEAR(hqlab::lil_band(1e6, 1), 2.625791914476011, 1e-12);
  EXPECT_THROW(hqlab::lil_band(2, 1), hqlab::Error);
}

TEST(ArLilRatio, Scaling) {
  const double n = 1e6;
  const double lambda = std::sqrt(2.0 * std::log(std::log(n)) / n);
  EXPECT_NEAR(hqlab::ar_lil_ratio(n, lambda), 1.0, 1e-12);
  EXPECT_NEAR(hqlab::ar_lil_ratio(n, -lambda), 1.0, 1e-12);
}
