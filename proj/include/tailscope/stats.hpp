#pragma once

// Small statistics toolkit: Kolmogorov-Smirnov, Clopper-Pearson, least squares.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <boost/math/distributions/binomial.hpp>

#include "tailscope/error.hpp"

namespace tailscope::stats {

/// sup_x |F_N(x) - F(x)| for a sample and a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> sample, Cdf&& cdf) {
  detail::require(!sample.empty(), "ks_statistic needs a nonempty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

/// P{K > lambda} for the Kolmogorov distribution.
inline double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

/// lambda with P{K > lambda} = alpha.
inline double kolmogorov_quantile(double alpha) {
  detail::require(alpha > 0.0 && alpha < 1.0, "kolmogorov_quantile requires alpha in (0, 1)");
  double lo = 0.2, hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_survival(mid) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Level-alpha critical value of the one-sample KS statistic, from the
/// asymptotic quantile with Stephens' finite-sample correction.
inline double ks_critical_value(std::size_t n, double alpha) {
  detail::require(n > 0, "ks_critical_value requires n > 0");
  const double sn = std::sqrt(static_cast<double>(n));
  return kolmogorov_quantile(alpha) / (sn + 0.12 + 0.11 / sn);
}

/// Two-sample KS statistic sup_x |F_a(x) - F_b(x)|.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  detail::require(!a.empty() && !b.empty(), "ks_two_sample needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

/// Asymptotic level-alpha critical value of the two-sample statistic.
inline double ks_two_sample_critical_value(std::size_t na, std::size_t nb, double alpha) {
  const double ne = static_cast<double>(na) * static_cast<double>(nb) / static_cast<double>(na + nb);
  return kolmogorov_quantile(alpha) / std::sqrt(ne);
}

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Exact (Clopper-Pearson) two-sided interval for a binomial proportion.
inline Interval clopper_pearson(std::size_t successes, std::size_t trials, double confidence = 0.95) {
  detail::require(trials > 0 && successes <= trials, "clopper_pearson requires 0 <= k <= N, N > 0");
  using boost::math::binomial_distribution;
  const double a = 0.5 * (1.0 - confidence);
  const auto k = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  Interval iv;
  iv.lo = successes == 0 ? 0.0 : binomial_distribution<>::find_lower_bound_on_p(n, k, a);
  iv.hi = successes == trials ? 1.0 : binomial_distribution<>::find_upper_bound_on_p(n, k, a);
  return iv;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double max_abs_residual = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size() && x.size() >= 2, "linear_fit needs two or more paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  detail::require(sxx > 0.0, "linear_fit: x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    sse += r * r;
    f.max_abs_residual = std::max(f.max_abs_residual, std::abs(r));
  }
  f.r2 = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  return f;
}

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};

inline MeanStderr mean_stderr(std::span<const double> v) {
  detail::require(v.size() >= 2, "mean_stderr needs two or more values");
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double var = ss / static_cast<double>(v.size() - 1);
  return {m, std::sqrt(var / static_cast<double>(v.size()))};
}

inline double median(std::vector<double> v) {
  detail::require(!v.empty(), "median of an empty set");
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

}  // namespace tailscope::stats
