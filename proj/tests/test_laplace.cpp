#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "tailscope/laplace.hpp"

using namespace tailscope;
using namespace tailscope::laplace;

namespace {

double midpoint_oracle(const Params& p, int steps = 1000000) {
  const double h = 1.0 / steps;
  double s = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double u = (i + 0.5) * h;
    s += std::exp(p.K * u - p.L * std::pow(u, p.beta));
  }
  return s * h;
}

}  // namespace

TEST(LaplaceIntegral, ClosedFormExamples) {
  EXPECT_NEAR(integral_I({0.0, 0.0, 1.0}), 1.0, 1e-14);
  EXPECT_NEAR(integral_I({0.0, 5.0, 1.0}), (1.0 - std::exp(-5.0)) / 5.0, 1e-12);
  EXPECT_NEAR(integral_I({0.0, 5.0, 1.0}), 0.198652, 1e-6);
  EXPECT_NEAR(integral_I({2.0, 5.0, 1.0}), 0.316738, 1e-6);
  EXPECT_NEAR(integral_I({3.0, 3.0, 1.0}), 1.0, 1e-12);
}

TEST(LaplaceIntegral, RejectsInvalidParameters) {
  EXPECT_THROW(integral_I({-1.0, 1.0, 1.0}), domain_error);
  EXPECT_THROW(integral_I({1.0, -1.0, 1.0}), domain_error);
  EXPECT_THROW(integral_I({1.0, 1.0, 0.0}), domain_error);
}

TEST(LaplaceIntegral, BetaOneMatchesClosedFormOnRandomRegimePoints) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> logL(std::log(0.5), std::log(1e4));
  std::uniform_real_distribution<double> frac(0.0, 0.5);
  for (int k = 0; k < 50; ++k) {
    const double L = std::exp(logL(rng));
    const double K = frac(rng) * L;
    const auto r = integral({K, L, 1.0});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, closed_form_beta1(K, L), 1e-8 * std::max(1.0, closed_form_beta1(K, L)));
  }
}

TEST(LaplaceIntegral, MatchesMidpointOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uK(0.0, 5.0), uL(0.01, 20.0), uB(0.3, 3.0);
  for (int k = 0; k < 50; ++k) {
    const Params p{uK(rng), uL(rng), uB(rng)};
    EXPECT_NEAR(integral_I(p), midpoint_oracle(p), 1e-6) << p.K << " " << p.L << " " << p.beta;
  }
}

TEST(LaplaceIntegral, ResolvesLargeL) {
  // L^{1/beta} I -> Gamma(1 + 1/beta) as L -> infinity with K = 0
  for (double beta : {0.5, 1.0, 2.0, 3.0}) {
    const double L = 1e8;
    EXPECT_NEAR(integral_I({0.0, L, beta}) * std::pow(L, 1.0 / beta), std::tgamma(1.0 + 1.0 / beta), 1e-8);
  }
}

TEST(Maximizer, Examples) {
  const auto m = maximizer({1.0, 1.0, 2.0});
  EXPECT_NEAR(m.u0, 0.5, 1e-15);
  EXPECT_NEAR(m.value, 0.25, 1e-15);
  EXPECT_NEAR(c_beta(2.0), 0.25, 1e-15);
  EXPECT_TRUE(m.interior);

  const auto edge = maximizer({6.0, 3.0, 2.0});
  EXPECT_NEAR(edge.u0, 1.0, 1e-15);
  EXPECT_FALSE(edge.interior);

  EXPECT_NEAR(maximizer({0.1, 10.0, 3.0}).u0, std::sqrt(0.1 / 30.0), 1e-15);
  EXPECT_NEAR(maximizer({0.1, 10.0, 3.0}).u0, 0.05774, 1e-5);
  EXPECT_THROW(maximizer({1.0, 1.0, 1.0}), domain_error);
  EXPECT_THROW(maximizer({1.0, 1.0, 0.5}), domain_error);
}

TEST(Maximizer, AgreesWithGridSearch) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> uK(0.05, 3.0), uL(0.5, 50.0), uB(1.1, 4.0), u01(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Params p{uK(rng), uL(rng), uB(rng)};
    const auto m = maximizer(p);
    if (!m.interior) continue;
    double best = -1e300, best_u = 0.0;
    for (int i = 0; i <= 1000000; ++i) {
      const double u = i * 1e-6;
      const double e = p.K * u - p.L * std::pow(u, p.beta);
      if (e > best) {
        best = e;
        best_u = u;
      }
    }
    EXPECT_NEAR(m.value, best, 1e-6);
    EXPECT_NEAR(m.u0, best_u, 1e-5);
    for (int k = 0; k < 1000; ++k) {
      const double u = u01(rng);
      EXPECT_GE(m.value, p.K * u - p.L * std::pow(u, p.beta) - 1e-15);
    }
  }
}

TEST(BoundCheck, Examples) {
  const auto r = bound_check({1.0, 10.0, 2.0});
  EXPECT_TRUE(std::isfinite(r.ratio));
  EXPECT_NEAR(r.rhs_scale, 0.1, 1e-15);
  EXPECT_THROW(bound_check({1.0, 1.0, 2.0}), regime_error);
  const auto c2 = bound_check({0.5, 100.0, 0.5});
  EXPECT_NEAR(case2_envelope(0.5), 8.0, 1e-14);
  EXPECT_LE(c2.ratio, 8.0);
}

TEST(BoundCheck, CaseTwoEnvelopeHoldsOnGrid) {
  std::vector<double> Ks, Ls;
  for (double e = -3; e <= 3; e += 0.25) Ks.push_back(std::pow(10.0, e));
  for (double e = -2; e <= 6; e += 0.25) Ls.push_back(std::pow(10.0, e));
  for (double beta : {0.3, 0.5, 0.8, 1.0}) {
    const auto scan = scan_bound(beta, Ks, Ls);
    ASSERT_FALSE(scan.cells.empty());
    for (const auto& c : scan.cells) {
      EXPECT_LE(c.lhs, case2_envelope(beta) * c.rhs_scale) << beta << " " << c.params.K << " " << c.params.L;
    }
  }
}

TEST(BoundCheck, CaseOneRatioGrowsWithL) {
  // At fixed K the ratio behaves like Gamma(1+1/beta) (L/K^beta)^{1-1/beta}
  // for large L, so no beta-only constant bounds it over the whole regime.
  for (double beta : {1.5, 2.0, 3.0}) {
    const double K = 1.0;
    double prev = 0.0;
    for (double L = 2.5; L < 1e5; L *= 3.0) {
      const double ratio = bound_check({K, L, beta}).ratio;
      EXPECT_GT(ratio, prev);
      prev = ratio;
    }
    const double L = 1e8;
    const double asym = std::tgamma(1.0 + 1.0 / beta) * std::pow(L, 1.0 - 1.0 / beta);
    EXPECT_NEAR(bound_check({K, L, beta}).ratio / asym, 1.0, 5e-3);
  }
}

TEST(BoundCheck, CaseOneSupIsFiniteOnABoundedGrid) {
  std::vector<double> Ks{0.1, 0.3, 1.0, 3.0}, Ls;
  for (double e = -1; e <= 4; e += 0.5) Ls.push_back(std::pow(10.0, e));
  for (double beta : {1.5, 2.0, 3.0}) {
    const auto scan = scan_bound(beta, Ks, Ls);
    EXPECT_TRUE(std::isfinite(scan.sup_ratio));
    EXPECT_GT(scan.sup_ratio, 0.0);
  }
}
