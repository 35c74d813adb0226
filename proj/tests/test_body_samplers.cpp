#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <gtest/gtest.h>

#include "tailscope/body_samplers.hpp"
#include "tailscope/stats.hpp"

using namespace tailscope;

namespace {

std::vector<double> column(const SampleBatch& b, int j) {
  std::vector<double> c(b.N);
  for (std::size_t i = 0; i < b.N; ++i) c[i] = b.row(i)[j];
  return c;
}

double moment(const std::vector<double>& v, int k) {
  double s = 0.0;
  for (double x : v) s += std::pow(x, k);
  return s / static_cast<double>(v.size());
}

}  // namespace

// ---- sphere ----------------------------------------------------------------

TEST(SampleSphere, RowsHaveUnitNorm) {
  const auto b = sample_sphere(17, 2000, 3);
  for (std::size_t i = 0; i < b.N; ++i) EXPECT_NEAR(lp_norm(b.row(i), 2.0), 1.0, 1e-12);
}

TEST(SampleSphere, FirstCoordinateFollowsTheSphericalMarginal) {
  const int n = 64;
  const std::size_t N = 200000;
  const auto b = sample_sphere(n, N, 2024);
  const double d = stats::ks_statistic(column(b, 0), [&](double x) { return sph_cdf(n, std::sqrt(64.0) * x); });
  EXPECT_LT(d, stats::ks_critical_value(N, 0.01));
}

TEST(SampleSphere, CoordinatesAreCentered) {
  const std::size_t N = 50000;
  const auto b = sample_sphere(10, N, 5);
  for (int j = 0; j < 10; ++j) EXPECT_LT(std::abs(moment(column(b, j), 1)), 4.0 / std::sqrt(N));
}

TEST(SampleSphere, CovarianceIsIdentityOverN) {
  const int n = 6;
  const std::size_t N = 40000;
  for (const auto& b : {sample_sphere(n, N, 8), sample_cone_lp(2.0, n, N, 9)}) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) s += b.row(i)[j] * b.row(i)[k];
        s /= N;
        EXPECT_NEAR(s, j == k ? 1.0 / n : 0.0, 5.0 / std::sqrt(N)) << j << "," << k;
      }
    }
  }
}

TEST(SampleSphere, RejectsDimensionOne) { EXPECT_THROW(sample_sphere(1, 10, 1), domain_error); }

// ---- determinism -----------------------------------------------------------

TEST(Sampling, DeterministicAndThreadCountIndependent) {
  const auto spec = BodySpec::lp_volume(1.5, 33);
  SampleOptions one{.chunk_size = 100, .threads = 1};
  SampleOptions many{.chunk_size = 100, .threads = 4};
  const auto a = sample(spec, 1234, 99, one);
  const auto b = sample(spec, 1234, 99, many);
  const auto c = sample(spec, 1234, 99, one);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.points, c.points);
  EXPECT_EQ(a.substream_seeds.size(), 13u);
  const auto d = sample(spec, 1234, 100, one);
  EXPECT_NE(a.points, d.points);
}

TEST(Sampling, StreamedRadialMatchesStoredBatch) {
  const auto spec = BodySpec::lp_cone(3.0, 40).scaled(0.5);
  SampleOptions opt{.chunk_size = 64, .threads = 3};
  const auto batch = sample(spec, 1000, 4, opt);
  EXPECT_EQ(sample_radial_values(spec, 1000, 4, opt), radial_values(batch));
}

TEST(Sampling, PrefixOfALongerRunIsStable) {
  // chunk boundaries align, so the first 2 chunks of a 3-chunk run equal a 2-chunk run
  SampleOptions opt{.chunk_size = 50};
  const auto a = sample(BodySpec::sphere(5), 100, 11, opt);
  const auto b = sample(BodySpec::sphere(5), 150, 11, opt);
  EXPECT_TRUE(std::equal(a.points.begin(), a.points.end(), b.points.begin()));
}

// ---- generalized Gaussian ----------------------------------------------------

TEST(SampleGenGaussian, PTwoHasVarianceOneHalf) {
  const std::size_t N = 100000;
  const auto b = sample_gen_gaussian(2.0, 4, N, 1);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(moment(column(b, j), 2), 0.5, 5.0 / std::sqrt(N));
}

TEST(SampleGenGaussian, POneIsLaplace) {
  const std::size_t N = 100000;
  const auto b = sample_gen_gaussian(1.0, 3, N, 2);
  for (int j = 0; j < 3; ++j) {
    const auto c = column(b, j);
    double abs_mean = 0.0;
    for (double x : c) abs_mean += std::abs(x);
    EXPECT_NEAR(abs_mean / N, 1.0, 5.0 / std::sqrt(N));
    EXPECT_NEAR(moment(c, 1), 0.0, 5.0 * std::sqrt(2.0 / N));
    EXPECT_NEAR(moment(c, 3), 0.0, 5.0 * std::sqrt(720.0 / N));
  }
}

TEST(SampleGenGaussian, MatchesTheDensityByKs) {
  // CDF by tanh-sinh integration of exp(-|t|^p) / (2 Gamma(1 + 1/p))
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double p : {1.0, 1.5, 3.0, 6.0}) {
    const double c = 1.0 / (2.0 * std::tgamma(1.0 + 1.0 / p));
    auto cdf = [&](double x) {
      const double half = ts.integrate([&](double s) { return c * std::exp(-std::pow(s, p)); }, 0.0, std::abs(x));
      return x >= 0 ? 0.5 + half : 0.5 - half;
    };
    const std::size_t N = 20000;
    const auto b = sample_gen_gaussian(p, 1, N, 17);
    EXPECT_LT(stats::ks_statistic(column(b, 0), cdf), stats::ks_critical_value(N, 0.01)) << p;
  }
}

TEST(SampleGenGaussian, RejectsInfiniteP) {
  EXPECT_THROW(sample_gen_gaussian(kInf, 3, 10, 1), domain_error);
  EXPECT_THROW(sample_cone_lp(kInf, 3, 10, 1), domain_error);
  EXPECT_THROW(sample_cone_lp(0.5, 3, 10, 1), domain_error);
}

// ---- cone --------------------------------------------------------------------

TEST(SampleCone, RowsHaveUnitPNorm) {
  for (double p : {1.0, 1.5, 2.0, 4.0, 11.0}) {
    const auto b = sample_cone_lp(p, 50, 3000, 6);
    for (std::size_t i = 0; i < b.N; ++i) ASSERT_NEAR(lp_norm(b.row(i), p), 1.0, 1e-12) << p;
  }
}

TEST(SampleCone, PTwoFirstCoordinateFollowsTheSphericalMarginal) {
  const int n = 64;
  const std::size_t N = 200000;
  const auto b = sample_cone_lp(2.0, n, N, 77);
  const double d = stats::ks_statistic(column(b, 0), [&](double x) { return sph_cdf(n, 8.0 * x); });
  EXPECT_LT(d, stats::ks_critical_value(N, 0.01));
}

TEST(SampleCone, POneInThreeDimensionsMatchesSimplexQuadrature) {
  // |V| is uniform on the simplex {x >= 0, x1 + x2 + x3 = 1}; integrate
  // |x|^2 over the triangle with a tensor midpoint rule.
  const int m = 2000;
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double x = (i + 0.5) / m, y = (j + 0.5) / m;
      if (x + y >= 1.0) continue;
      const double z = 1.0 - x - y;
      s += (x * x + y * y + z * z);
    }
  }
  const double expected = s / (m * m) * 2.0;  // triangle area 1/2
  const std::size_t N = 100000;
  const auto b = sample_cone_lp(1.0, 3, N, 12);
  std::vector<double> sq(N);
  for (std::size_t i = 0; i < N; ++i) sq[i] = std::pow(lp_norm(b.row(i), 2.0), 2);
  const auto ms = stats::mean_stderr(sq);
  EXPECT_NEAR(expected, 0.5, 1e-3);
  EXPECT_LT(std::abs(ms.mean - expected), 3.0 * ms.std_error);
}

// ---- volume ------------------------------------------------------------------

TEST(SampleVolume, CubeSecondMoment) {
  const std::size_t N = 100000;
  const auto b = sample_volume_lp(kInf, 5, N, 4);
  for (int j = 0; j < 5; ++j) EXPECT_NEAR(moment(column(b, j), 2), 1.0 / 3.0, 5.0 / std::sqrt(N));
}

TEST(SampleVolume, RowsStayInsideTheBall) {
  for (double p : {1.0, 2.0, 3.5, kInf}) {
    const auto b = sample_volume_lp(p, 20, 3000, 8);
    for (std::size_t i = 0; i < b.N; ++i) ASSERT_LE(lp_norm(b.row(i), p), 1.0 + 1e-12);
  }
}

TEST(SampleVolume, RadialLawIsRToTheN) {
  const std::size_t N = 200000;
  for (double p : {1.0, 2.0, 5.0, kInf}) {
    const int n = 4;
    const auto b = sample_volume_lp(p, n, N, 21);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < N; ++i) inside += lp_norm(b.row(i), p) <= 0.5;
    const auto iv = stats::clopper_pearson(inside, N, 0.999);
    EXPECT_TRUE(iv.contains(std::pow(0.5, n))) << p << " " << inside;
  }
}

TEST(SampleVolume, EuclideanThreeBallMarginal) {
  // density 3/4 (1 - x^2) on [-1, 1]
  const std::size_t N = 100000;
  const auto b = sample_volume_lp(2.0, 3, N, 31);
  const double d =
      stats::ks_statistic(column(b, 0), [](double x) { return 0.5 + 0.75 * x - 0.25 * x * x * x; });
  EXPECT_LT(d, stats::ks_critical_value(N, 0.01));
}

TEST(SampleVolume, RescaledVolumeReproducesConeMarginals) {
  for (double p : {1.0, 3.0}) {
    const int n = 10;
    const std::size_t N = 40000;
    const auto vol = sample_volume_lp(p, n, N, 41);
    const auto cone = sample_cone_lp(p, n, N, 42);
    std::vector<double> a(N);
    for (std::size_t i = 0; i < N; ++i) a[i] = vol.row(i)[0] / lp_norm(vol.row(i), p);
    EXPECT_LT(stats::ks_two_sample(a, column(cone, 0)), stats::ks_two_sample_critical_value(N, N, 0.01)) << p;
  }
}

// ---- product laws ------------------------------------------------------------

TEST(SampleProduct, RademacherCoordinatesAreSigns) {
  const auto b = sample_product(CoordinateLaw::rademacher(), 13, 500, 1);
  for (double v : b.points) EXPECT_EQ(std::abs(v), 1.0);
}

TEST(SampleProduct, UniformRootThreeHasUnitVariance) {
  const auto law = CoordinateLaw::uniform(std::sqrt(3.0));
  EXPECT_NEAR(law.variance(), 1.0, 1e-15);
  const std::size_t N = 100000;
  const auto b = sample_product(law, 2, N, 3);
  EXPECT_NEAR(moment(column(b, 0), 2), 1.0, 5.0 * std::sqrt(0.8 / N));
}

TEST(SampleProduct, IsotropicTruncatedNormal) {
  const auto law = CoordinateLaw::truncated_normal(0.7).isotropic();
  EXPECT_NEAR(law.variance(), 1.0, 1e-14);
  const std::size_t N = 100000;
  const auto b = sample_product(law, 1, N, 5);
  EXPECT_NEAR(moment(column(b, 0), 2), 1.0, 5.0 / std::sqrt(N));
  // tail() is a valid survival function of the sampled law
  const double d = stats::ks_statistic(column(b, 0), [&](double x) { return 1.0 - law.tail(x); });
  EXPECT_LT(d, stats::ks_critical_value(N, 0.01));
}

TEST(SampleProduct, RademacherSumMatchesBinomial) {
  const int n = 20;
  const std::size_t N = 200000;
  const auto b = sample_product(CoordinateLaw::rademacher(), n, N, 13);
  std::vector<std::size_t> counts(n + 1, 0);
  for (std::size_t i = 0; i < N; ++i) {
    double s = 0.0;
    for (double v : b.row(i)) s += v;
    counts[static_cast<std::size_t>(std::lround((s + n) / 2.0))]++;
  }
  for (int k = 0; k <= n; ++k) {
    const double pk = boost::math::binomial_coefficient<double>(n, k) * std::pow(0.5, n);
    EXPECT_TRUE(stats::clopper_pearson(counts[k], N, 0.9999).contains(pk)) << k;
  }
}

TEST(CoordinateLaw, Psi2Constants) {
  EXPECT_NEAR(CoordinateLaw::rademacher().psi2_constant(), 1.0 / std::sqrt(std::log(2.0)), 1e-9);
  for (auto law : {CoordinateLaw::uniform(1.0), CoordinateLaw::uniform(std::sqrt(3.0)).isotropic(),
                   CoordinateLaw::truncated_normal(2.0)}) {
    const double c = law.psi2_constant();
    // independent check by tanh-sinh of the defining moment
    boost::math::quadrature::tanh_sinh<double> ts;
    double m = 0.0;
    if (law.kind == CoordinateLaw::Kind::uniform) {
      m = ts.integrate([&](double z) { return std::exp(std::pow(law.scale * z / c, 2)); }, 0.0, law.a) / law.a;
    } else {
      const double mass = std::erf(law.a / std::sqrt(2.0));
      m = 2.0 *
          ts.integrate(
              [&](double z) { return std::exp(std::pow(law.scale * z / c, 2) - z * z / 2) / std::sqrt(2 * M_PI); },
              0.0, law.a) /
          mass;
    }
    EXPECT_NEAR(m, 2.0, 1e-8);
  }
  EXPECT_THROW(CoordinateLaw::uniform(0.0), domain_error);
  EXPECT_THROW(CoordinateLaw::truncated_normal(-1.0), domain_error);
}

// ---- radial projection ---------------------------------------------------------

TEST(RadialProjection, SphereIsAConstantRadius) {
  const int n = 25;
  const auto unit = radial_projection(sample_sphere(n, 200, 1));
  for (double r : unit.radii()) EXPECT_NEAR(r, 1.0 / std::sqrt(n), 1e-14);
  const auto big = radial_projection(sample(BodySpec::sphere(n).scaled(1.0 / std::sqrt(n)), 200, 1));
  for (double r : big.radii()) EXPECT_NEAR(r, 1.0, 1e-13);
}

TEST(RadialProjection, CubeMeanRadius) {
  const auto d = radial_projection(sample_volume_lp(kInf, 1024, 2000, 3));
  EXPECT_NEAR(d.mean(), std::sqrt(1.0 / 3.0), 2e-3);
}

// ---- export ----------------------------------------------------------------------

TEST(BinaryExport, RoundTripAndHeader) {
  const auto b = sample(BodySpec::lp_cone(1.0, 7), 33, 5);
  std::stringstream ss;
  write_batch_binary(b, ss);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 16u + 33u * 7u * 8u);
  EXPECT_EQ(bytes.substr(0, 4), "TSB1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 7);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 33);
  const auto r = read_batch_binary(ss);
  EXPECT_EQ(r.n, 7u);
  EXPECT_EQ(r.N, 33u);
  EXPECT_EQ(r.points, b.points);
  std::stringstream bad("XXXX");
  EXPECT_THROW(read_batch_binary(bad), domain_error);
}
