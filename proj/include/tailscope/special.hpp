#pragma once

// Log-space helpers shared by the reference distributions.

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace tailscope::special {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;  // log(sqrt(2*pi))

/// log(Gamma(a + 1/2) / Gamma(a)), accurate for very large a where a plain
/// lgamma difference cancels catastrophically.
inline double log_gamma_ratio_half(double a) {
  return -std::log(boost::math::tgamma_delta_ratio(a, 0.5));
}

/// log(1 - exp(x)) for x <= 0.
inline double log1mexp(double x) {
  if (x > -std::numbers::ln2) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

/// log(exp(a) + exp(b)).
inline double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

inline double gauss_log_density(double t) { return -0.5 * t * t - kLogSqrt2Pi; }

/// Mills ratio (1 - Phi(t)) / phi(t) by the Laplace continued fraction.
/// Intended for t >= 5 where the fraction converges in a few dozen terms.
inline double mills_ratio_cf(double t) {
  double f = t;
  for (int k = 120; k >= 1; --k) f = t + k / f;
  return 1.0 / f;
}

/// log(1 - Phi(t)). erfc covers t < 30; beyond that the continued fraction
/// keeps the result finite long after the tail itself underflows.
inline double log_gauss_tail(double t) {
  if (t < -5.0) return std::log1p(-0.5 * std::erfc(-t * std::numbers::sqrt2 / 2.0));
  if (t < 30.0) return std::log(0.5 * std::erfc(t * std::numbers::sqrt2 / 2.0));
  return gauss_log_density(t) + std::log(mills_ratio_cf(t));
}

inline double gauss_tail(double t) { return 0.5 * std::erfc(t * std::numbers::sqrt2 / 2.0); }
inline double gauss_cdf(double t) { return 0.5 * std::erfc(-t * std::numbers::sqrt2 / 2.0); }
inline double gauss_density(double t) { return std::exp(gauss_log_density(t)); }

}  // namespace tailscope::special
