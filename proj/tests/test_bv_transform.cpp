#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tailscope/bv_transform.hpp"

using namespace tailscope;

namespace {

/// |X|/sqrt(n) for X uniform on the cube [-sqrt3, sqrt3]^n, drawn directly.
std::vector<double> cube_radii(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-std::sqrt(3.0), std::sqrt(3.0));
  std::vector<double> r(count);
  for (auto& v : r) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = u(rng);
      s += x * x;
    }
    v = std::sqrt(s / n);
  }
  return r;
}

/// (Psi_n(t/a) - Psi_n(t/b)) / t = int_a^b r^-2 psi_n(t/r) dr.
double kernel_closed_form(int n, double t, double a, double b) {
  return (sph_cdf(n, t / a) - sph_cdf(n, t / b)) / t;
}

}  // namespace

TEST(RadialDistribution, ValidatesInput) {
  EXPECT_THROW(RadialDistribution::atom(16, 0.0), domain_error);
  EXPECT_THROW(RadialDistribution::atom(16, -1.0), domain_error);
  EXPECT_THROW(RadialDistribution::atoms(16, {{1.0, 0.5}, {2.0, 0.4}}), domain_error);
  EXPECT_THROW(RadialDistribution::atoms(16, {{1.0, 1.5}, {2.0, -0.5}}), domain_error);
  EXPECT_THROW(RadialDistribution::atoms(16, {{0.0, 0.5}, {2.0, 0.5}}), domain_error);
  EXPECT_THROW(RadialDistribution::empirical(16, {}), domain_error);
  EXPECT_THROW(RadialDistribution::atom(2, 1.0), domain_error);
}

TEST(RadialDistribution, CdfIsAValidDistributionFunction) {
  auto d = RadialDistribution::empirical(64, cube_radii(64, 500, 1));
  EXPECT_EQ(d.cdf(0.0), 0.0);
  EXPECT_EQ(d.cdf(1e9), 1.0);
  double prev = 0.0;
  for (double r = 0.5; r < 1.5; r += 0.001) {
    EXPECT_GE(d.cdf(r), prev);
    prev = d.cdf(r);
  }
  const auto radii = d.radii();
  EXPECT_TRUE(std::is_sorted(radii.begin(), radii.end()));
}

TEST(AvgTail, AtomAtOneIsTheSphericalTail) {
  for (int n : {3, 16, 256, 4096}) {
    const auto atom = RadialDistribution::atom(n, 1.0);
    const double h = std::sqrt(static_cast<double>(n));
    for (int k = 0; k < 100; ++k) {
      const double t = h * k / 100.0;
      EXPECT_NEAR(avg_tail(atom, t), sph_tail(n, t), 1e-12);
      EXPECT_NEAR(avg_density(atom, t), sph_density(n, t), 1e-12);
    }
  }
  EXPECT_NEAR(avg_tail(RadialDistribution::atom(64, 1.0), 2.0), oracle::sph_tail(64, 2.0), 1e-12);
}

TEST(AvgTail, AtomScaling) {
  const auto atom = RadialDistribution::atom(100, 0.7);
  for (double t : {0.0, 0.3, 1.0, 2.5}) EXPECT_NEAR(avg_tail(atom, t), sph_tail(100, t / 0.7), 1e-15);
}

TEST(AvgDensity, TwoAtomsAtZero) {
  const auto d = RadialDistribution::atoms(50, {{0.5, 0.5}, {2.0, 0.5}});
  EXPECT_NEAR(avg_density(d, 0.0), 1.25 * sph_density(50, 0.0), 1e-15);
}

TEST(AvgDensity, IsMinusTheDerivativeOfTheTail) {
  const auto d = RadialDistribution::atoms(40, {{0.6, 0.2}, {1.0, 0.5}, {1.7, 0.3}});
  for (double t = 0.1; t < 3.5; t += 0.1) {
    const double fd = -oracle::central_difference([&](double x) { return avg_tail(d, x); }, t, 1e-5);
    EXPECT_NEAR(fd, avg_density(d, t), 1e-5 * avg_density(d, t)) << t;
  }
}

TEST(AvgDensity, IntegratesToOne) {
  const auto d = RadialDistribution::atoms(30, {{0.6, 0.2}, {1.0, 0.5}, {1.7, 0.3}});
  boost::math::quadrature::tanh_sinh<double> ts;
  double total = 0.0;
  // integrate piecewise between the support edges sqrt(n) r_i
  const double edges[] = {0.0, 0.6 * std::sqrt(30.0), std::sqrt(30.0), 1.7 * std::sqrt(30.0)};
  for (int k = 0; k + 1 < 4; ++k) total += ts.integrate([&](double t) { return avg_density(d, t); }, edges[k], edges[k + 1]);
  EXPECT_NEAR(2.0 * total, 1.0, 1e-9);
}

TEST(AvgTail, LinearInTheRadialLaw) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = RadialDistribution::atoms(64, {{u(rng), 0.25}, {u(rng), 0.75}});
    const auto b = RadialDistribution::empirical(64, {u(rng), u(rng), u(rng)});
    const double w = u(rng) / 2.0;
    const auto mix = RadialDistribution::mixture(a, b, w);
    for (double t : {0.0, 0.5, 1.5, 3.0}) {
      EXPECT_NEAR(avg_tail(mix, t), (1 - w) * avg_tail(a, t) + w * avg_tail(b, t), 1e-12);
    }
  }
}

TEST(AvgTail, Nonincreasing) {
  const auto d = RadialDistribution::empirical(128, cube_radii(128, 300, 8));
  double prev = 1.0;
  for (double t = 0.0; t < 8.0; t += 0.05) {
    const double v = avg_tail(d, t);
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(AvgTail, AgreesWithDirectMonteCarloOnTheCube) {
  // B_infinity^64 volume measure (coordinates uniform on [-1, 1]), t = 1.
  const int n = 64;
  const int count = 100000;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::normal_distribution<double> gauss;
  std::vector<double> radii(count);
  std::vector<double> x(n), xi(n);
  int hits = 0;
  for (int k = 0; k < count; ++k) {
    double r2 = 0.0, g2 = 0.0, dot = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] = coord(rng);
      xi[i] = gauss(rng);
      r2 += x[i] * x[i];
      g2 += xi[i] * xi[i];
      dot += x[i] * xi[i];
    }
    radii[k] = std::sqrt(r2 / n);
    if (dot / std::sqrt(g2) >= 1.0) ++hits;
  }
  const auto est = avg_tail_estimate(RadialDistribution::empirical(n, radii), 1.0);
  const double p = static_cast<double>(hits) / count;
  const double se_direct = std::sqrt(p * (1 - p) / count);
  EXPECT_LT(std::abs(est.value - p), 3.0 * std::hypot(est.std_error, se_direct));
  EXPECT_GT(est.std_error, 0.0);
}

TEST(ErrorTerms, DegenerateAtOne) {
  const auto e = error_terms(RadialDistribution::atom(256, 1.0), 2.0);
  EXPECT_EQ(e.term1, 0.0);
  EXPECT_EQ(e.term2, 0.0);
  EXPECT_EQ(e.term3, 0.0);
}

TEST(ErrorTerms, MassBeyondTwoGivesPositiveFirstTerm) {
  const auto e = error_terms(RadialDistribution::atoms(64, {{1.0, 0.9}, {2.5, 0.1}}), 1.0);
  EXPECT_GT(e.term1, 0.0);
  EXPECT_NEAR(e.term1, 0.1 * fixtures::kSphderC / sph_density(64, 1.0), 1e-14);
}

TEST(ErrorTerms, MatchClosedFormKernelIntegrals) {
  const int n = 200;
  const double t = 1.7;
  const auto d = RadialDistribution::atoms(n, {{0.6, 0.1}, {0.9, 0.3}, {1.2, 0.4}, {1.6, 0.15}, {2.4, 0.05}});
  const auto e = error_terms(d, t);
  const double psi = sph_density(n, t);
  // mu* levels: 0.1 on [0.6, 0.9), 0.4 on [0.9, 1); then 1 - mu* = 0.6 on [1, 1.2), 0.2 on [1.2, 1.6), 0.05 on [1.6, 2)
  const double term2 = (0.1 * kernel_closed_form(n, t, 0.6, 0.9) + 0.4 * kernel_closed_form(n, t, 0.9, 1.0)) / psi;
  const double term3 = (0.6 * kernel_closed_form(n, t, 1.0, 1.2) + 0.2 * kernel_closed_form(n, t, 1.2, 1.6) +
                        0.05 * kernel_closed_form(n, t, 1.6, 2.0)) /
                       psi;
  EXPECT_NEAR(e.term2, term2, 1e-9 * term2);
  EXPECT_NEAR(e.term3, term3, 1e-9 * term3);
}

TEST(ErrorTerms, RejectsOutsideRange) {
  const auto d = RadialDistribution::atom(64, 1.0);
  EXPECT_THROW(error_terms(d, 0.0), domain_error);
  EXPECT_THROW(error_terms(d, 3.0), domain_error);  // 8 * 9 > 64
}

TEST(ErrorTerms, DecompositionInequalityOnCubeRadial) {
  const int n = 256;
  const auto d = RadialDistribution::empirical(n, cube_radii(n, 20000, 5));
  for (double t : {1.0, 2.0, 3.0, 5.0}) {
    const auto e = error_terms(d, t);
    const double lhs = std::abs(avg_tail(d, t) / sph_tail(n, t) - 1.0);
    EXPECT_LE(lhs, error_bound(e, t)) << t;
  }
}

TEST(ErrorTerms, DecompositionInequalityOnRandomAtoms) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.3, 2.6);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 32 << (trial % 5);
    std::vector<std::pair<double, double>> rw;
    for (int k = 0; k < 4; ++k) rw.emplace_back(u(rng), 0.25);
    const auto d = RadialDistribution::atoms(n, rw);
    const double t_max = std::sqrt(n / 8.0);
    for (double frac : {0.2, 0.5, 0.9}) {
      const double t = std::max(1.0, frac * t_max);
      if (8.0 * t * t >= n) continue;
      const double lhs = std::abs(avg_tail(d, t) / sph_tail(n, t) - 1.0);
      EXPECT_LE(lhs, error_bound(error_terms(d, t), t)) << "n=" << n << " t=" << t;
    }
  }
}

TEST(TheoremBound, Examples) {
  ConcentrationProfile p;
  p.alpha = 1.0;
  p.beta = 2.0;
  EXPECT_EQ(theorem_bound(p, 256, 0.0), 0.0);
  EXPECT_NEAR(theorem_bound(p, 256, 2.0), 1.0 / 16.0, 1e-15);
  TheoremConfig cfg;
  cfg.C = 3.0;
  EXPECT_NEAR(theorem_bound(p, 256, 2.0, cfg), 3.0 / 16.0, 1e-15);
  p.beta = 1.0;
  EXPECT_NEAR(theorem_bound(p, 1024, 3.0), 9.0 / 1024.0, 1e-15);
  p.beta = 2.0;
  EXPECT_THROW(theorem_bound(p, 256, 4.0), regime_error);
}

TEST(RadialCsv, ReadsOneColumnWithHeader) {
  std::istringstream in("r_over_sqrt_n\n1.25\r\n0.5\n\n0.75\n");
  const auto d = read_radial_csv(in, 64);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d.radii()[0], 0.5);
  EXPECT_EQ(d.radii()[2], 1.25);
  std::istringstream bad_header("r\n1\n");
  EXPECT_THROW(read_radial_csv(bad_header, 64), domain_error);
  std::istringstream bad_row("r_over_sqrt_n\n1.0x\n");
  EXPECT_THROW(read_radial_csv(bad_row, 64), domain_error);
}
