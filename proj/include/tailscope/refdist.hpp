#pragma once

// Gaussian and spherical reference laws.
//
// psi_n is the density of the first coordinate of a uniform point on the
// sphere of radius sqrt(n) in R^n:
//
//   psi_n(t) = Gamma(n/2) / (sqrt(pi n) Gamma((n-1)/2)) * (1 - t^2/n)^((n-3)/2)
//
// on [-sqrt(n), sqrt(n)]. Everything is evaluated in log space so that
// dimensions up to 1e7 neither overflow nor underflow.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tailscope/error.hpp"
#include "tailscope/quadrature.hpp"
#include "tailscope/special.hpp"

namespace tailscope {

/// How the spherical CDF is evaluated.
enum class TailMethod { incomplete_beta, adaptive_simpson };

/// The spherical tail is computed through the identity
/// (1 + t/sqrt(n))/2 ~ Beta((n-1)/2, (n-1)/2), using Boost's regularized
/// incomplete beta. Tails below kLogTailSwitch fall back to Gauss-Kronrod
/// quadrature of psi_n(s)/psi_n(t) so the log tail stays finite.
inline constexpr TailMethod kSphTailMethod = TailMethod::incomplete_beta;
inline constexpr double kLogTailSwitch = 1e-280;

class SphericalMarginal {
 public:
  explicit SphericalMarginal(int n) : n_(n) {
    if (n < 3) throw domain_error("spherical marginal requires n >= 3, got " + std::to_string(n));
    const double nd = n;
    half_width_ = std::sqrt(nd);
    shape_ = 0.5 * (nd - 1.0);
    exponent_ = 0.5 * (nd - 3.0);
    log_norm_ = special::log_gamma_ratio_half(shape_) - 0.5 * std::log(std::numbers::pi * nd);
  }

  int dimension() const { return n_; }
  double half_width() const { return half_width_; }
  double log_normalizer() const { return log_norm_; }

  double log_density(double t) const {
    const double a = std::abs(t);
    if (n_ == 3) return a <= half_width_ ? log_norm_ : special::kNegInf;
    if (!(a < half_width_)) return special::kNegInf;
    return log_norm_ + exponent_ * std::log1p(-(t * t) / n_);
  }

  double density(double t) const {
    const double v = log_density(t);
    return v == special::kNegInf ? 0.0 : std::exp(v);
  }

  /// 1 - Psi_n(t).
  double tail(double t) const {
    if (t >= half_width_) return 0.0;
    if (t <= -half_width_) return 1.0;
    if (t == 0.0) return 0.5;
    if (n_ == 3) return (half_width_ - t) / (2.0 * half_width_);
    if (t > 0.0) return boost::math::ibeta(shape_, shape_, (half_width_ - t) / (2.0 * half_width_));
    return boost::math::ibetac(shape_, shape_, (half_width_ + t) / (2.0 * half_width_));
  }

  double cdf(double t) const { return tail(-t); }

  /// log(1 - Psi_n(t)); finite for every t < sqrt(n).
  double log_tail(double t) const {
    const double direct = tail(t);
    if (direct >= kLogTailSwitch || t >= half_width_) {
      return direct > 0.0 ? std::log(direct) : special::kNegInf;
    }
    // psi(s)/psi(t) <= exp(-slope (s - t)) by concavity of log psi, so
    // [t, t + 60/slope] carries all but e^-60 of the mass.
    const double base = log_density(t);
    const double slope = (n_ - 3.0) * t / (n_ - t * t);
    const double upper = std::min(half_width_, t + 60.0 / slope);
    auto integrand = [&](double s) {
      const double v = log_density(s);
      return v == special::kNegInf ? 0.0 : std::exp(v - base);
    };
    const double mass = quad::gauss_kronrod(integrand, t, upper, 1e-14).value;
    return base + std::log(mass);
  }

  /// d/dt log psi_n(t) = -(n-3) t / (n - t^2).
  double log_slope(double t) const {
    if (n_ == 3) {
      if (std::abs(t) > half_width_) throw domain_error("log slope requires |t| <= sqrt(3) for n = 3");
      return 0.0;
    }
    if (!(std::abs(t) < half_width_)) throw domain_error("log slope requires |t| < sqrt(n)");
    return -(n_ - 3.0) * t / (n_ - t * t);
  }

 private:
  int n_;
  double half_width_ = 0.0;
  double shape_ = 0.0;
  double exponent_ = 0.0;
  double log_norm_ = 0.0;
};

// ---- free-function surface -------------------------------------------------

inline double sph_log_density(int n, double t) { return SphericalMarginal(n).log_density(t); }
inline double sph_density(int n, double t) { return SphericalMarginal(n).density(t); }
inline double sph_cdf(int n, double t) { return SphericalMarginal(n).cdf(t); }
inline double sph_tail(int n, double t) { return SphericalMarginal(n).tail(t); }
inline double sph_log_tail(int n, double t) { return SphericalMarginal(n).log_tail(t); }
inline double sph_log_slope(int n, double t) { return SphericalMarginal(n).log_slope(t); }

inline double gauss_density(double t) { return special::gauss_density(t); }
inline double gauss_cdf(double t) { return special::gauss_cdf(t); }
inline double gauss_tail(double t) { return special::gauss_tail(t); }
inline double gauss_log_tail(double t) { return special::log_gauss_tail(t); }

/// Both sides of 1 - Phi(t - s) <= (1 - Phi(t)) e^{st}.
struct ShiftBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio() const { return lhs / rhs; }
  bool holds() const { return lhs <= rhs * (1.0 + 1e-14); }
};

inline ShiftBound gauss_shift_bound(double t, double s) {
  detail::require(t > 0.0, "gauss_shift_bound requires t > 0");
  detail::require(s >= 0.0, "gauss_shift_bound requires s >= 0");
  return {std::exp(special::log_gauss_tail(t - s)), std::exp(special::log_gauss_tail(t) + s * t)};
}

/// log(psi_n(t) / psi_n((1+u) t)) / (u t^2), bounded above and below by
/// positive constants on 2(1+u)^2 t^2 < n.
inline double sph_shift_ratio(int n, double t, double u) {
  detail::require(n >= 4, "sph_shift_ratio requires n >= 4");
  detail::require(t > 0.0, "sph_shift_ratio requires t > 0");
  detail::require(u >= 0.0 && u <= 1.0, "sph_shift_ratio requires u in [0, 1]");
  const double grown = (1.0 + u) * t;
  detail::require(2.0 * grown * grown < n, "sph_shift_ratio requires 2(1+u)^2 t^2 < n");
  const double exponent = 0.5 * (n - 3.0);
  if (u == 0.0) return 2.0 * exponent / (n - t * t);
  // (1 - t^2/n) / (1 - (1+u)^2 t^2/n) = 1 + t^2 (2u + u^2) / (n - (1+u)^2 t^2)
  const double log_ratio = exponent * std::log1p(t * t * (2.0 * u + u * u) / (n - grown * grown));
  return log_ratio / (u * t * t);
}

struct SphGaussRow {
  double t = 0.0;
  double density_ratio = 0.0;      // psi_n(t) / phi(t)
  double tail_ratio = 0.0;         // (1 - Psi_n(t)) / (1 - Phi(t))
  double fourth_order = 0.0;       // log(psi_n/phi) + t^4 / (4n)
  double fourth_order_bound = 0.0; // 2 (t^2/n + t^6/n^2)
};

struct SphGaussReport {
  int n = 0;
  std::vector<SphGaussRow> rows;
};

inline SphGaussRow sph_gauss_row(const SphericalMarginal& sph, double t) {
  const double n = sph.dimension();
  SphGaussRow row;
  row.t = t;
  const double log_density_ratio = sph.log_density(t) - special::gauss_log_density(t);
  row.density_ratio = std::exp(log_density_ratio);
  row.tail_ratio = std::exp(sph.log_tail(t) - special::log_gauss_tail(t));
  row.fourth_order = log_density_ratio + t * t * t * t / (4.0 * n);
  row.fourth_order_bound = 2.0 * (t * t / n + std::pow(t, 6) / (n * n));
  return row;
}

/// Spherical vs Gaussian comparison on a grid inside (0, sqrt(n)/4).
inline SphGaussReport sph_gauss_report(int n, std::span<const double> t_grid) {
  SphericalMarginal sph(n);
  const double limit = 0.25 * sph.half_width();
  SphGaussReport report{n, {}};
  report.rows.reserve(t_grid.size());
  for (double t : t_grid) {
    if (!(t > 0.0 && t < limit)) {
      throw domain_error("sph_gauss_report: t = " + std::to_string(t) + " outside (0, sqrt(n)/4)");
    }
    report.rows.push_back(sph_gauss_row(sph, t));
  }
  return report;
}

}  // namespace tailscope
