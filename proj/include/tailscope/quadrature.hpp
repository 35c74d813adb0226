#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace tailscope::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

namespace detail {

template <class F>
double simpson_step(F& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth, Result& out) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  out.evaluations += 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    if (depth <= 0 && std::abs(delta) > 15.0 * tol) out.converged = false;
    out.error += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, out) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, out);
}

}  // namespace detail

/// Adaptive Simpson with interval halving and Richardson correction.
/// `tol` is an absolute target for the whole interval; it is split evenly
/// between the two halves at each level.
template <class F>
Result adaptive_simpson(F&& f, double a, double b, double tol = 1e-12, int max_depth = 48) {
  Result out;
  if (a == b) return out;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  out.evaluations = 3;
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  out.value = detail::simpson_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth, out);
  return out;
}

namespace detail {

template <class F>
double kronrod_step(F& f, double a, double b, double abs_tol, unsigned depth, Result& out) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  using G = boost::math::quadrature::gauss<double, 15>;
  // max_depth 0: a single fixed-order panel
  const double k = GK::integrate(f, a, b, 0, 0.0);
  const double g = G::integrate(f, a, b);
  out.evaluations += 46;
  const double err = std::abs(k - g);
  const double floor = 1e2 * std::numeric_limits<double>::epsilon() * std::abs(k);
  if (err <= std::max(abs_tol, floor)) {
    out.error += err;
    return k;
  }
  if (depth == 0) {
    out.converged = false;
    out.error += err;
    return k;
  }
  const double m = 0.5 * (a + b);
  return kronrod_step(f, a, m, 0.5 * abs_tol, depth - 1, out) + kronrod_step(f, m, b, 0.5 * abs_tol, depth - 1, out);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod: 31-point Kronrod panels (Boost) with the
/// embedded 15-point Gauss rule as error estimate, bisected until the
/// estimate is below tol times the magnitude of the first full-interval value.
template <class F>
Result gauss_kronrod(F&& f, double a, double b, double tol = 1e-13, unsigned max_depth = 30) {
  Result out;
  if (a == b) return out;
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double first = GK::integrate(f, a, b, 0, 0.0);
  out.value = detail::kronrod_step(f, a, b, std::max(tol * std::abs(first), 1e-300), max_depth, out);
  return out;
}

}  // namespace tailscope::quad
