#pragma once

// I(K; L) = int_0^1 exp(K u - L u^beta) du and the bound
// K I(K; L) <= C_beta K^{max(beta,1)} / L  for  K^{max(beta,1)}/L < 1/2.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "tailscope/error.hpp"
#include "tailscope/quadrature.hpp"

namespace tailscope::laplace {

struct Params {
  double K = 0.0;
  double L = 0.0;
  double beta = 1.0;
};

inline void validate(const Params& p) {
  detail::require(std::isfinite(p.K) && p.K >= 0.0, "laplace: K must be finite and >= 0");
  detail::require(std::isfinite(p.L) && p.L >= 0.0, "laplace: L must be finite and >= 0");
  detail::require(std::isfinite(p.beta) && p.beta > 0.0, "laplace: beta must be positive");
}

/// (e^{K-L} - 1)/(K - L), the beta = 1 closed form; 1 when K = L.
inline double closed_form_beta1(double K, double L) {
  const double d = K - L;
  if (d == 0.0) return 1.0;
  return std::expm1(d) / d;
}

/// Quadrature value of I(K; L). The integrand varies on the scale
/// L^{-1/beta} near 0, so [0, 1] is cut geometrically from that scale
/// upwards, and at the maximizer u0 when beta > 1.
inline quad::Result integral(const Params& p, double tol = 1e-12) {
  validate(p);
  std::vector<double> cuts{0.0, 1.0};
  if (p.L > 1.0) {
    for (double s = std::pow(1.0 / p.L, 1.0 / p.beta); s < 1.0; s *= 2.0) cuts.push_back(s);
  }
  if (p.beta > 1.0 && p.K > 0.0 && p.L > 0.0) {
    const double u0 = std::pow(p.K / (p.beta * p.L), 1.0 / (p.beta - 1.0));
    if (u0 > 0.0 && u0 < 1.0) cuts.push_back(u0);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto f = [&](double u) { return std::exp(p.K * u - p.L * std::pow(u, p.beta)); };
  quad::Result total;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const auto piece = quad::gauss_kronrod(f, cuts[k], cuts[k + 1], tol);
    total.value += piece.value;
    total.error += piece.error;
    total.evaluations += piece.evaluations;
    total.converged = total.converged && piece.converged;
  }
  return total;
}

inline double integral_I(const Params& p) { return integral(p).value; }

/// C_beta = beta^{-1/(beta-1)} - beta^{-beta/(beta-1)}.
inline double c_beta(double beta) {
  detail::require(beta > 1.0, "C_beta requires beta > 1");
  return std::pow(beta, -1.0 / (beta - 1.0)) - std::pow(beta, -beta / (beta - 1.0));
}

struct Maximizer {
  double u0 = 0.0;
  double value = 0.0;  // E(u0) = C_beta (K^beta / L)^{1/(beta-1)}
  bool interior = true;  // false when u0 >= 1 (the maximum over [0,1] is then at u = 1)
};

/// Maximizer of the concave exponent E(u) = K u - L u^beta, beta > 1.
inline Maximizer maximizer(const Params& p) {
  validate(p);
  if (!(p.beta > 1.0)) throw domain_error("maximizer requires beta > 1");
  detail::require(p.K > 0.0 && p.L > 0.0, "maximizer requires K > 0 and L > 0");
  Maximizer m;
  m.u0 = std::pow(p.K / (p.beta * p.L), 1.0 / (p.beta - 1.0));
  m.value = c_beta(p.beta) * std::pow(std::pow(p.K, p.beta) / p.L, 1.0 / (p.beta - 1.0));
  m.interior = m.u0 < 1.0;
  return m;
}

/// 2^{1/beta} Gamma(1/beta + 1), the explicit constant for beta <= 1.
inline double case2_envelope(double beta) {
  detail::require(beta > 0.0, "case2_envelope requires beta > 0");
  return std::pow(2.0, 1.0 / beta) * std::tgamma(1.0 / beta + 1.0);
}

struct BoundRecord {
  Params params;
  double lhs = 0.0;        // K I(K; L)
  double rhs_scale = 0.0;  // K^{max(beta,1)} / L
  double ratio = 0.0;      // lhs / rhs_scale
};

inline BoundRecord bound_check(const Params& p) {
  validate(p);
  detail::require(p.K > 0.0 && p.L > 0.0, "bound_check requires K > 0 and L > 0");
  const double scale = std::pow(p.K, std::max(p.beta, 1.0)) / p.L;
  if (!(scale < 0.5)) {
    throw regime_error("bound_check: K^{max(beta,1)}/L = " + std::to_string(scale) +
                       " is outside the regime (< 1/2)");
  }
  BoundRecord r;
  r.params = p;
  r.lhs = p.K * integral_I(p);
  r.rhs_scale = scale;
  r.ratio = r.lhs / scale;
  return r;
}

struct BoundScan {
  double beta = 0.0;
  double sup_ratio = 0.0;
  Params argmax;
  std::vector<BoundRecord> cells;  // regime cells only, in grid order (K outer, L inner)
};

/// bound_check over a K x L grid, skipping cells outside the regime.
inline BoundScan scan_bound(double beta, std::span<const double> K_grid, std::span<const double> L_grid) {
  BoundScan s;
  s.beta = beta;
  for (double K : K_grid) {
    for (double L : L_grid) {
      const Params p{K, L, beta};
      if (!(K > 0.0 && L > 0.0) || !(std::pow(K, std::max(beta, 1.0)) / L < 0.5)) continue;
      auto rec = bound_check(p);
      if (rec.ratio > s.sup_ratio) {
        s.sup_ratio = rec.ratio;
        s.argmax = p;
      }
      s.cells.push_back(rec);
    }
  }
  return s;
}

}  // namespace tailscope::laplace
