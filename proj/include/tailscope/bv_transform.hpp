#pragma once

// Average marginals from the radial law (Brehm-Voigt).
//
// For a measure mu on R^n with no atom at 0, the uniform mixture over
// directions of the marginals <X, xi> satisfies
//
//   1 - F^av(t) = int (1 - Psi_n(t/r)) dmu*(r),   f^av(t) = int psi_n(t/r)/r dmu*(r)
//
// where mu*(r) = P{|X| <= sqrt(n) r}. A RadialDistribution stores mu* as a
// finite set of atoms, so both integrals are exact weighted sums.

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tailscope/error.hpp"
#include "tailscope/fixtures.hpp"
#include "tailscope/profile.hpp"
#include "tailscope/quadrature.hpp"
#include "tailscope/refdist.hpp"

namespace tailscope {

class RadialDistribution {
 public:
  enum class Kind { atom, atoms, empirical };

  static RadialDistribution atom(int n, double r0) {
    detail::require(r0 > 0.0 && std::isfinite(r0), "radial atom must be a positive finite radius");
    RadialDistribution d(n, Kind::atom);
    d.r_ = {r0};
    d.w_ = {1.0};
    d.finish();
    return d;
  }

  /// Weighted atoms; weights must be nonnegative and sum to 1 within 1e-12.
  static RadialDistribution atoms(int n, std::vector<std::pair<double, double>> rw) {
    detail::require(!rw.empty(), "radial distribution needs at least one atom");
    double total = 0.0;
    for (auto [r, w] : rw) {
      detail::require(r > 0.0 && std::isfinite(r), "radial atoms must be positive and finite");
      detail::require(w >= 0.0 && std::isfinite(w), "radial weights must be nonnegative");
      total += w;
    }
    detail::require(std::abs(total - 1.0) <= 1e-12, "radial weights must sum to 1");
    std::sort(rw.begin(), rw.end());
    RadialDistribution d(n, Kind::atoms);
    for (auto [r, w] : rw) {
      d.r_.push_back(r);
      d.w_.push_back(w);
    }
    d.finish();
    return d;
  }

  /// Equal-weight sample of |X|/sqrt(n); sorted on construction.
  static RadialDistribution empirical(int n, std::vector<double> r) {
    detail::require(!r.empty(), "empirical radial distribution needs at least one value");
    for (double v : r) detail::require(v > 0.0 && std::isfinite(v), "radial values must be positive and finite");
    std::sort(r.begin(), r.end());
    RadialDistribution d(n, Kind::empirical);
    d.r_ = std::move(r);
    d.w_.assign(d.r_.size(), 1.0 / static_cast<double>(d.r_.size()));
    d.finish();
    return d;
  }

  /// (1 - w) a + w b, as atoms.
  static RadialDistribution mixture(const RadialDistribution& a, const RadialDistribution& b, double w) {
    detail::require(a.n_ == b.n_, "mixture components must share the dimension");
    detail::require(w >= 0.0 && w <= 1.0, "mixture weight must lie in [0, 1]");
    std::vector<std::pair<double, double>> rw;
    for (std::size_t i = 0; i < a.size(); ++i) rw.emplace_back(a.r_[i], (1.0 - w) * a.w_[i]);
    for (std::size_t i = 0; i < b.size(); ++i) rw.emplace_back(b.r_[i], w * b.w_[i]);
    // renormalize away the rounding of the two scaled sums
    double total = 0.0;
    for (auto& p : rw) total += p.second;
    for (auto& p : rw) p.second /= total;
    return atoms(a.n_, std::move(rw));
  }

  int dimension() const { return n_; }
  Kind kind() const { return kind_; }
  std::size_t size() const { return r_.size(); }
  std::span<const double> radii() const { return r_; }
  std::span<const double> weights() const { return w_; }

  /// mu*(r) = P{|X| <= sqrt(n) r}.
  double cdf(double r) const {
    const auto it = std::upper_bound(r_.begin(), r_.end(), r);
    const auto k = static_cast<std::size_t>(it - r_.begin());
    return k == 0 ? 0.0 : std::min(1.0, cum_[k - 1]);
  }

  double mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i < r_.size(); ++i) s += w_[i] * r_[i];
    return s;
  }

 private:
  RadialDistribution(int n, Kind kind) : n_(n), kind_(kind) {
    detail::require(n >= 3, "radial distribution requires n >= 3");
  }

  void finish() {
    cum_.resize(r_.size());
    std::partial_sum(w_.begin(), w_.end(), cum_.begin());
  }

  int n_;
  Kind kind_;
  std::vector<double> r_;
  std::vector<double> w_;
  std::vector<double> cum_;
};

/// Estimate with its Monte Carlo standard error (0 for exact atomic laws).
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// 1 - F^av(t) together with the sampling standard error of the weighted
/// sum when the radial law is empirical.
inline Estimate avg_tail_estimate(const RadialDistribution& radial, double t) {
  detail::require(t >= 0.0, "avg_tail requires t >= 0");
  const SphericalMarginal sph(radial.dimension());
  const auto r = radial.radii();
  const auto w = radial.weights();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double v = sph.tail(t / r[i]);
    sum += w[i] * v;
    sum_sq += w[i] * v * v;
  }
  Estimate e{sum, 0.0};
  if (radial.kind() == RadialDistribution::Kind::empirical && r.size() > 1) {
    const double m = static_cast<double>(r.size());
    const double var = std::max(0.0, sum_sq - sum * sum) * m / (m - 1.0);
    e.std_error = std::sqrt(var / m);
  }
  return e;
}

inline double avg_tail(const RadialDistribution& radial, double t) { return avg_tail_estimate(radial, t).value; }

inline Estimate avg_density_estimate(const RadialDistribution& radial, double t) {
  const SphericalMarginal sph(radial.dimension());
  const auto r = radial.radii();
  const auto w = radial.weights();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double v = sph.density(t / r[i]) / r[i];
    sum += w[i] * v;
    sum_sq += w[i] * v * v;
  }
  Estimate e{sum, 0.0};
  if (radial.kind() == RadialDistribution::Kind::empirical && r.size() > 1) {
    const double m = static_cast<double>(r.size());
    e.std_error = std::sqrt(std::max(0.0, sum_sq - sum * sum) / (m - 1.0));
  }
  return e;
}

inline double avg_density(const RadialDistribution& radial, double t) {
  return avg_density_estimate(radial, t).value;
}

struct ErrorTerms {
  double term1 = 0.0;
  double term2 = 0.0;
  double term3 = 0.0;
};

namespace detail {

/// int_a^b r^-2 psi_n(t/r)/psi_n(t) dr by adaptive Simpson, integrand in log space,
/// relative accuracy about rel_tol.
inline double kernel_integral(const SphericalMarginal& sph, double t, double log_psi_t, double a, double b,
                              double rel_tol) {
  if (b <= a) return 0.0;
  // psi_n(t/r) vanishes for r <= t/sqrt(n)
  a = std::max(a, t / sph.half_width());
  if (b <= a) return 0.0;
  auto f = [&](double r) {
    const double ld = sph.log_density(t / r);
    return ld == special::kNegInf ? 0.0 : std::exp(ld - log_psi_t - 2.0 * std::log(r));
  };
  // the ratio psi_n(t/r)/psi_n(t) spans many orders of magnitude, so the
  // target is taken relative to a coarse Simpson estimate of the piece
  const double coarse = (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
  return quad::adaptive_simpson(f, a, b, std::max(rel_tol * coarse, 1e-300), 30).value;
}

}  // namespace detail

/// TERM1..TERM3 of the average-marginal error decomposition:
///   TERM1 = (1 - mu*(2)) C t / psi_n(t)
///   TERM2 = int_0^1 r^-2 psi_n(t/r)/psi_n(t) mu*(r) dr
///   TERM3 = int_1^2 r^-2 psi_n(t/r)/psi_n(t) (1 - mu*(r)) dr
/// mu* is a step function, so the integrals are taken piecewise between atoms.
inline ErrorTerms error_terms(const RadialDistribution& radial, double t, double sphder_c = fixtures::kSphderC) {
  const int n = radial.dimension();
  detail::require(t > 0.0, "error_terms requires t > 0");
  detail::require(8.0 * t * t < n, "error_terms requires 8 t^2 < n");
  const SphericalMarginal sph(n);
  const double log_psi_t = sph.log_density(t);
  ErrorTerms out;
  out.term1 = (1.0 - radial.cdf(2.0)) * sphder_c * t * std::exp(-log_psi_t);

  const auto r = radial.radii();
  // breakpoints: atoms inside (0, 2) plus 1 and 2
  std::vector<double> cuts{0.0, 1.0, 2.0};
  for (double v : r) {
    if (v > 0.0 && v < 2.0) cuts.push_back(v);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double piece_tol = 1e-11;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    const double level = radial.cdf(a);  // mu* is constant on [a, b)
    if (b <= 1.0) {
      if (level > 0.0) out.term2 += level * detail::kernel_integral(sph, t, log_psi_t, a, b, piece_tol);
    } else if (level < 1.0) {
      out.term3 += (1.0 - level) * detail::kernel_integral(sph, t, log_psi_t, a, b, piece_tol);
    }
  }
  return out;
}

/// Right-hand side of the decomposition inequality,
/// TERM1 + C t^2 (TERM2 + TERM3).
inline double error_bound(const ErrorTerms& e, double t, double c = fixtures::kBv2C) {
  return e.term1 + c * t * t * (e.term2 + e.term3);
}

struct TheoremConfig {
  double C = fixtures::kTheoremC;
  double c = fixtures::kTheoremRegime;
};

/// Predicted deviation C t^{2 max(beta,1)} n^-alpha of 1 - F^av from 1 - Psi_n.
inline double theorem_bound(const ConcentrationProfile& profile, int n, double t, const TheoremConfig& cfg = {}) {
  detail::require(n >= 1, "theorem_bound requires n >= 1");
  detail::require(t >= 0.0, "theorem_bound requires t >= 0");
  const double x = std::pow(t, 2.0 * std::max(profile.beta, 1.0)) * std::pow(static_cast<double>(n), -profile.alpha);
  if (!(x < cfg.c)) {
    throw regime_error("theorem_bound: t^{2max(beta,1)} n^-alpha = " + std::to_string(x) +
                       " is outside the regime (< " + std::to_string(cfg.c) + ")");
  }
  return cfg.C * x;
}

// ---- CSV -------------------------------------------------------------------

inline constexpr const char* kRadialCsvHeader = "r_over_sqrt_n";

/// Reads a one-column CSV with header `r_over_sqrt_n`.
inline RadialDistribution read_radial_csv(std::istream& in, int n) {
  std::string line;
  if (!std::getline(in, line)) throw domain_error("radial CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRadialCsvHeader) throw domain_error("radial CSV header must be `r_over_sqrt_n`, got `" + line + "`");
  std::vector<double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != line.size()) throw domain_error("radial CSV row " + std::to_string(row) + " is not a number");
    values.push_back(v);
  }
  return RadialDistribution::empirical(n, std::move(values));
}

}  // namespace tailscope
