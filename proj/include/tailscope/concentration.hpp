#pragma once

// Norm concentration:
//   P{ | |X|/sqrt(n) - 1 | >= u } <= A exp(-B n^alpha u^beta),
// estimated from samples, fitted across dimensions, transferred from cone to
// volume measure; plus psi_alpha tail fits, Bernstein's inequality and the
// concentration inequality on the sphere.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tailscope/body_samplers.hpp"
#include "tailscope/error.hpp"
#include "tailscope/io.hpp"
#include "tailscope/parallel.hpp"
#include "tailscope/profile.hpp"
#include "tailscope/quadrature.hpp"
#include "tailscope/refdist.hpp"
#include "tailscope/stats.hpp"

namespace tailscope {

// ---- deviation curves ------------------------------------------------------

struct DeviationPoint {
  double u = 0.0;
  double p_hat = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

struct DeviationCurve {
  int n = 0;
  std::size_t N = 0;
  double normalization = 1.0;
  std::string spec;
  std::vector<DeviationPoint> points;
};

/// | |X|_2 / sqrt(n) - 1 | per row, sorted. Rows are already divided by the
/// spec's normalization constant.
inline std::vector<double> sorted_deviations(std::span<const double> radial) {
  std::vector<double> d(radial.size());
  std::transform(radial.begin(), radial.end(), d.begin(), [](double r) { return std::abs(r - 1.0); });
  std::sort(d.begin(), d.end());
  return d;
}

/// Counts P{dev >= u} on a sorted deviation sample.
inline DeviationCurve deviation_curve(std::span<const double> sorted_dev, int n, std::span<const double> u_grid) {
  detail::require(!sorted_dev.empty(), "deviation curve needs a nonempty sample");
  DeviationCurve c;
  c.n = n;
  c.N = sorted_dev.size();
  const double N = static_cast<double>(c.N);
  for (double u : u_grid) {
    detail::require(u >= 0.0 && u <= 1.0, "deviation u must lie in [0, 1]");
    const auto it = std::lower_bound(sorted_dev.begin(), sorted_dev.end(), u);
    const auto k = static_cast<std::size_t>(sorted_dev.end() - it);
    const double p = k / N;
    c.points.push_back({u, p, std::sqrt(p * (1.0 - p) / N), k});
  }
  return c;
}

inline DeviationCurve empirical_deviation(const SampleBatch& batch, std::span<const double> u_grid) {
  detail::require(batch.N >= 1, "empirical_deviation needs a nonempty batch");
  const auto d = sorted_deviations(radial_values(batch));
  auto c = deviation_curve(d, batch.spec.n, u_grid);
  c.normalization = batch.spec.normalization;
  c.spec = batch.spec.describe();
  return c;
}

/// u-grid at empirical tail levels: u_k with P{dev >= u_k} ~ level_k.
/// The default levels run geometrically from 1/2 down to 100/N (16 points).
inline std::vector<double> quantile_u_grid(std::span<const double> sorted_dev, std::vector<double> levels = {}) {
  const std::size_t N = sorted_dev.size();
  detail::require(N >= 200, "quantile_u_grid needs at least 200 samples");
  if (levels.empty()) {
    const double lo = 100.0 / static_cast<double>(N), hi = 0.5;
    for (int k = 0; k < 16; ++k) levels.push_back(hi * std::pow(lo / hi, k / 15.0));
  }
  std::vector<double> u;
  for (double q : levels) {
    detail::require(q > 0.0 && q < 1.0, "tail levels must lie in (0, 1)");
    const auto idx = static_cast<std::size_t>(std::floor((1.0 - q) * static_cast<double>(N)));
    u.push_back(std::min(sorted_dev[std::min(idx, N - 1)], 1.0));
  }
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

/// Samples `spec` (streamed) and returns its deviation curve on a quantile grid.
inline DeviationCurve sample_deviation_curve(const BodySpec& spec, std::size_t N, std::uint64_t seed,
                                             const SampleOptions& opt = {}, std::vector<double> levels = {}) {
  const auto d = sorted_deviations(sample_radial_values(spec, N, seed, opt));
  auto c = deviation_curve(d, spec.n, quantile_u_grid(d, std::move(levels)));
  c.normalization = spec.normalization;
  c.spec = spec.describe();
  return c;
}

// ---- profile fit -------------------------------------------------------------

namespace detail {

struct FitPoint {
  int n;
  double log_n, log_u, log_p;
};

struct StagedFit {
  double A, B, alpha, beta, sse, max_residual;
};

/// Staged fit at a trial A: beta from the within-dimension slope of
/// log(-log(P/A)) in log u, alpha from the slope in log n of what is left,
/// then (A, B) from regressing log P on n^alpha u^beta.
inline StagedFit staged_fit(const std::vector<std::vector<FitPoint>>& groups, double A) {
  const double logA = std::log(A);
  double num = 0.0, den = 0.0;
  for (const auto& g : groups) {
    double mx = 0.0, my = 0.0;
    for (const auto& p : g) {
      mx += p.log_u;
      my += std::log(logA - p.log_p);
    }
    mx /= g.size();
    my /= g.size();
    for (const auto& p : g) {
      const double y = std::log(logA - p.log_p);
      num += (p.log_u - mx) * (y - my);
      den += (p.log_u - mx) * (p.log_u - mx);
    }
  }
  StagedFit f{};
  f.beta = num / den;
  std::vector<double> ln, z;
  for (const auto& g : groups) {
    for (const auto& p : g) {
      ln.push_back(p.log_n);
      z.push_back(std::log(logA - p.log_p) - f.beta * p.log_u);
    }
  }
  f.alpha = stats::linear_fit(ln, z).slope;
  std::vector<double> w, lp;
  for (const auto& g : groups) {
    for (const auto& p : g) {
      w.push_back(std::exp(f.alpha * p.log_n + f.beta * p.log_u));
      lp.push_back(p.log_p);
    }
  }
  const auto reg = stats::linear_fit(w, lp);
  f.A = std::exp(reg.intercept);
  f.B = -reg.slope;
  f.sse = 0.0;
  f.max_residual = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double r = reg.intercept + reg.slope * w[i] - lp[i];
    f.sse += r * r;
    f.max_residual = std::max(f.max_residual, std::abs(r));
  }
  return f;
}

}  // namespace detail

inline constexpr double kRoundingDeviation = 1e-12;

/// Fits (A, B, alpha, beta) to deviation curves of three or more dimensions.
/// Points with P in {0, 1} or u at rounding level carry no information and
/// are skipped; the cone of B_2^n, for instance, only produces u ~ 1e-16.
/// The inner stages need A; it is profiled out by minimizing the squared
/// log-residual of the final regression.
inline ConcentrationProfile fit_profile(const std::vector<DeviationCurve>& curves, const std::string& family = "") {
  detail::require(curves.size() >= 3, "fit_profile needs curves for at least 3 dimensions");
  std::map<int, std::vector<detail::FitPoint>> by_n;
  double max_p = 0.0, u_min = 1.0, u_max = 0.0;
  for (const auto& c : curves) {
    detail::require(c.n >= 1, "deviation curve has no dimension");
    for (const auto& p : c.points) {
      if (!(p.p_hat > 0.0 && p.p_hat < 1.0 && p.u > kRoundingDeviation)) continue;
      by_n[c.n].push_back({c.n, std::log(static_cast<double>(c.n)), std::log(p.u), std::log(p.p_hat)});
      max_p = std::max(max_p, p.p_hat);
      u_min = std::min(u_min, p.u);
      u_max = std::max(u_max, p.u);
    }
  }
  std::vector<std::vector<detail::FitPoint>> groups;
  for (auto& [n, g] : by_n) {
    if (g.size() >= 4) groups.push_back(g);
  }
  if (groups.size() < 3) {
    throw insufficient_data_error("fit_profile: insufficient dynamic range (need 4 points with 0 < P < 1 in each of 3 dimensions)");
  }

  // coarse scan of log A above log max P, then golden-section refinement
  const double lo = std::log(max_p) + 1e-9, span = 6.0;
  auto sse = [&](double la) {
    const auto f = detail::staged_fit(groups, std::exp(la));
    return std::isfinite(f.sse) ? f.sse : std::numeric_limits<double>::infinity();
  };
  const int grid = 240;
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= grid; ++k) {
    const double v = sse(lo + span * k / grid);
    if (v < best_v) best_v = v, best = k;
  }
  double a = lo + span * std::max(best - 1, 0) / grid, b = lo + span * std::min(best + 1, grid) / grid;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a), fc = sse(c), fd = sse(d);
  for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a), fc = sse(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a), fd = sse(d);
    }
  }
  double la = 0.5 * (a + b);
  if (best_v < sse(la)) la = lo + span * best / grid;
  const auto f = detail::staged_fit(groups, std::exp(la));
  if (!(f.A > 0.0 && f.B > 0.0 && std::isfinite(f.alpha) && std::isfinite(f.beta))) {
    throw insufficient_data_error("fit_profile: the staged fit did not produce positive constants");
  }

  ConcentrationProfile p{f.A, f.B, f.alpha, f.beta, {}};
  p.provenance.family = family;
  for (const auto& g : groups) p.provenance.dimensions.push_back(g.front().n);
  p.provenance.u_min = u_min;
  p.provenance.u_max = u_max;
  p.provenance.residual = f.max_residual;
  p.provenance.method = "fit";
  return p;
}

/// Exact curves A exp(-B n^alpha u^beta) on a grid; a round-trip fixture.
inline DeviationCurve synthetic_curve(const ConcentrationProfile& p, int n, std::span<const double> u_grid) {
  DeviationCurve c;
  c.n = n;
  c.spec = "synthetic";
  for (double u : u_grid) {
    c.points.push_back({u, p.A * std::exp(-p.B * std::pow(static_cast<double>(n), p.alpha) * std::pow(u, p.beta)), 0.0, 0});
  }
  return c;
}

enum class ProfileSource { cone, surface };

/// Volume-measure profile implied by a cone or surface profile:
/// exponents (min(alpha, 1), max(beta, 1)); constants from the union bound
/// of the (1 - u/2) split, A' = A + 1 and B' = min(B 2^-beta, 1/2).
inline ConcentrationProfile transfer_profile(const ConcentrationProfile& p, ProfileSource source) {
  detail::require(p.A > 0.0 && p.B > 0.0, "transfer_profile requires A, B > 0");
  ConcentrationProfile v = p;
  v.A = p.A + 1.0;
  v.B = std::min(p.B * std::pow(2.0, -p.beta), 0.5);
  v.alpha = std::min(p.alpha, 1.0);
  v.beta = std::max(p.beta, 1.0);
  v.provenance.method = source == ProfileSource::cone ? "transfer:cone" : "transfer:surface";
  return v;
}

// ---- psi_alpha tail fit ------------------------------------------------------

struct TailFit {
  double alpha = 0.0;
  double c = 0.0;
  double s_min = 0.0;
  double s_max = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Regresses log(-log P{Y > s}) on log s over a geometric grid in [s_min, s_max].
/// Grid points with fewer than 10 exceedances are dropped.
inline TailFit psi_alpha_fit(std::vector<double> samples, double s_min, double s_max, int grid_points = 20) {
  detail::require(samples.size() >= 10000, "psi_alpha_fit needs at least 10^4 samples");
  detail::require(s_min > 0.0 && s_max > s_min, "psi_alpha_fit requires 0 < s_min < s_max");
  detail::require(grid_points >= 3, "psi_alpha_fit needs at least 3 grid points");
  std::sort(samples.begin(), samples.end());
  const double N = static_cast<double>(samples.size());
  auto exceed = [&](double s) {
    return static_cast<std::size_t>(samples.end() - std::upper_bound(samples.begin(), samples.end(), s));
  };
  detail::require(s_max <= samples.back(), "psi_alpha_fit: s_max lies beyond the observed support");
  if (exceed(s_min) < 100) throw insufficient_data_error("psi_alpha_fit: insufficient tail mass above s_min");
  std::vector<double> x, y;
  for (int k = 0; k < grid_points; ++k) {
    const double s = s_min * std::pow(s_max / s_min, k / (grid_points - 1.0));
    const std::size_t m = exceed(s);
    if (m < 10) continue;
    const double p = m / N;
    if (p >= 1.0) continue;
    x.push_back(std::log(s));
    y.push_back(std::log(-std::log(p)));
  }
  if (x.size() < 3) throw insufficient_data_error("psi_alpha_fit: fewer than 3 usable grid points");
  const auto f = stats::linear_fit(x, y);
  if (!(f.slope > 0.0)) throw insufficient_data_error("psi_alpha_fit: tail does not decay on the window");
  return {f.slope, std::exp(f.intercept), s_min, s_max, f.r2, x.size()};
}

/// <X, theta> for every row and one fixed direction, streamed.
inline std::vector<double> sample_projection(const BodySpec& spec, std::span<const double> theta, std::size_t N,
                                             std::uint64_t seed, const SampleOptions& opt = {}) {
  detail::require(theta.size() == static_cast<std::size_t>(spec.n), "direction has the wrong dimension");
  const std::size_t n = theta.size();
  auto parts = map_sample_chunks<std::vector<double>>(
      spec, N, seed, opt, [&](std::span<const double> rows, std::size_t count, std::size_t) {
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += rows[i * n + j] * theta[j];
          out[i] = s;
        }
        return out;
      });
  std::vector<double> all;
  all.reserve(N);
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

/// Uniform direction on S^{n-1} from its own seed.
inline std::vector<double> random_direction(int n, std::uint64_t seed) {
  detail::require(n >= 1, "direction dimension must be >= 1");
  Engine rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(static_cast<std::size_t>(n));
  double norm = 0.0;
  do {
    for (double& x : v) x = g(rng);
    norm = lp_norm(v, 2.0);
  } while (norm == 0.0);
  for (double& x : v) x /= norm;
  return v;
}

// ---- Bernstein ---------------------------------------------------------------

/// exp(-eps^2 n / (16 C^2)) on 0 <= eps <= c sqrt(n).
inline double bernstein_envelope(double C, double eps, int n, double c = 1.0) {
  detail::require(C > 0.0 && n >= 1, "bernstein_envelope requires C > 0, n >= 1");
  if (!(eps >= 0.0 && eps <= c * std::sqrt(static_cast<double>(n)))) {
    throw regime_error("bernstein_envelope: eps = " + std::to_string(eps) + " outside [0, c sqrt(n)]");
  }
  return std::exp(-eps * eps * n / (16.0 * C * C));
}

/// Smallest C with E exp(h/C) <= 2 for h = U^2 - 1/3, U uniform on [-1, 1].
inline double centered_uniform_square_constant() {
  auto m = [](double C) {
    auto f = [&](double x) { return std::exp((x * x - 1.0 / 3.0) / C); };
    return quad::gauss_kronrod(f, 0.0, 1.0, 1e-13).value;
  };
  double lo = 0.01, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (m(mid) > 2.0 ? lo : hi) = mid;
  }
  return hi;
}

struct BernsteinRow {
  double eps = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  double envelope = 0.0;
  bool holds = false;
};

struct BernsteinCheck {
  int n = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double C = 0.0;
  std::vector<BernsteinRow> rows;
  bool all_hold() const {
    return std::all_of(rows.begin(), rows.end(), [](const BernsteinRow& r) { return r.holds; });
  }
};

/// Monte Carlo exceedances P{sum_j (U_j^2 - 1/3) > eps n} against the envelope.
inline BernsteinCheck bernstein_mc_check(int n, std::size_t trials, std::span<const double> eps_grid,
                                         std::uint64_t seed, unsigned threads = 0) {
  detail::require(n >= 1 && trials >= 2, "bernstein_mc_check requires n >= 1 and 2 or more trials");
  BernsteinCheck out{n, trials, seed, centered_uniform_square_constant(), {}};
  const std::size_t chunk = 4096;
  auto parts = map_indexed<std::vector<double>>(chunk_count(trials, chunk), threads, [&](std::size_t c) {
    Engine rng(substream_seed(seed, c));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t count = std::min(trials, (c + 1) * chunk) - c * chunk;
    std::vector<double> sums(count);
    for (double& s : sums) {
      s = 0.0;
      for (int j = 0; j < n; ++j) {
        const double x = u(rng);
        s += x * x - 1.0 / 3.0;
      }
    }
    return sums;
  });
  std::vector<double> sums;
  for (auto& p : parts) sums.insert(sums.end(), p.begin(), p.end());
  std::sort(sums.begin(), sums.end());
  const double N = static_cast<double>(trials);
  for (double eps : eps_grid) {
    BernsteinRow r;
    r.eps = eps;
    const auto k = sums.end() - std::upper_bound(sums.begin(), sums.end(), eps * n);
    r.empirical = k / N;
    r.std_error = std::sqrt(r.empirical * (1.0 - r.empirical) / N);
    r.envelope = bernstein_envelope(out.C, eps, n);
    r.holds = r.empirical <= r.envelope;
    out.rows.push_back(r);
  }
  return out;
}

// ---- concentration on the sphere ---------------------------------------------

/// Height of the Euclidean gamma-extension of the half-sphere {x_1 <= 0}:
/// a point at angle theta above the equator has chord distance 2 sin(theta/2)
/// to it, so the extension is {x_1 <= sin(2 asin(gamma/2))} = {x_1 <= h}.
inline double cap_height(double gamma) {
  detail::require(gamma >= 0.0 && gamma <= 2.0, "cap_height requires gamma in [0, 2]");
  return gamma * std::sqrt(1.0 - 0.25 * gamma * gamma);
}

struct SphereCapRow {
  double gamma = 0.0;
  double h = 0.0;
  double outside = 0.0;  // 1 - sigma(A_gamma)
  double lhs = 0.0;      // sigma(A) (1 - sigma(A_gamma))
  double rhs = 0.0;      // exp(-(n-1) gamma^2 / 4)
  bool holds = false;
};

struct SphereCapReport {
  int n = 0;
  std::vector<SphereCapRow> rows;
  bool all_hold() const {
    return std::all_of(rows.begin(), rows.end(), [](const SphereCapRow& r) { return r.holds; });
  }
};

/// sigma(A)(1 - sigma(A_gamma)) <= exp(-(n-1) gamma^2/4) for A the half-sphere,
/// with 1 - sigma(A_gamma) = 1 - Psi_n(sqrt(n) h(gamma)).
inline SphereCapReport sphere_cap_check(int n, std::span<const double> gamma_grid) {
  detail::require(n >= 3, "sphere_cap_check requires n >= 3");
  const SphericalMarginal sph(n);
  SphereCapReport rep{n, {}};
  for (double gamma : gamma_grid) {
    detail::require(gamma >= 0.0 && gamma <= 1.0, "sphere_cap_check requires gamma in [0, 1]");
    SphereCapRow r;
    r.gamma = gamma;
    r.h = cap_height(gamma);
    const double log_out = sph.log_tail(std::sqrt(static_cast<double>(n)) * r.h);
    r.outside = std::exp(log_out);
    r.lhs = 0.5 * r.outside;
    r.rhs = std::exp(-(n - 1.0) * gamma * gamma / 4.0);
    r.holds = std::log(0.5) + log_out <= std::log(r.rhs);
    rep.rows.push_back(r);
  }
  return rep;
}

struct SphereCapMc {
  int n = 0;
  double gamma = 0.0;
  std::size_t N = 0;
  double outside = 0.0;    // fraction at distance > gamma from A
  double std_error = 0.0;  // binomial, at the larger of the estimate and the analytic value
  double analytic = 0.0;
  double z = 0.0;
  bool agrees() const { return std::abs(z) <= 3.0; }
};

/// Monte Carlo of 1 - sigma(A_gamma): the nearest point of A to x with
/// x_1 > 0 is (0, x_2, ..., x_n)/|(x_2, ..., x_n)|, and its distance is
/// computed directly in coordinates.
inline SphereCapMc sphere_cap_mc(int n, double gamma, std::size_t N, std::uint64_t seed, const SampleOptions& opt = {}) {
  detail::require(n >= 3 && N >= 1, "sphere_cap_mc requires n >= 3, N >= 1");
  const auto nn = static_cast<std::size_t>(n);
  auto counts = map_sample_chunks<std::size_t>(
      BodySpec::sphere(n), N, seed, opt, [&](std::span<const double> rows, std::size_t count, std::size_t) {
        std::size_t outside = 0;
        for (std::size_t i = 0; i < count; ++i) {
          const auto x = rows.subspan(i * nn, nn);
          if (x[0] <= 0.0) continue;
          const double rest = lp_norm(x.subspan(1), 2.0);
          double d2 = x[0] * x[0];
          for (std::size_t j = 1; j < nn; ++j) {
            const double diff = x[j] - x[j] / rest;
            d2 += diff * diff;
          }
          outside += std::sqrt(d2) > gamma;
        }
        return outside;
      });
  SphereCapMc mc;
  mc.n = n;
  mc.gamma = gamma;
  mc.N = N;
  std::size_t k = 0;
  for (auto c : counts) k += c;
  mc.outside = k / static_cast<double>(N);
  mc.analytic = sph_tail(n, std::sqrt(static_cast<double>(n)) * cap_height(gamma));
  const double p = std::max(mc.outside, mc.analytic);
  mc.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(N));
  mc.z = mc.std_error > 0.0 ? (mc.outside - mc.analytic) / mc.std_error : 0.0;
  return mc;
}

// ---- cone mean norm ----------------------------------------------------------

struct MeanNormScan {
  double p = 2.0;
  std::vector<int> dims;
  std::vector<double> mean_norm;
  std::vector<double> std_error;
  double slope = 0.0;      // of log E|x| against log n
  double prefactor = 0.0;  // exp(intercept)
};

/// E|x|_2 under the cone measure of B_p^n for each n, and the log-log slope
/// (expected 1/2 - 1/p).
inline MeanNormScan cone_mean_norm_scan(double p, const std::vector<int>& dims, std::size_t N, std::uint64_t seed,
                                        const SampleOptions& opt = {}) {
  detail::require(dims.size() >= 2, "cone_mean_norm_scan needs two or more dimensions");
  MeanNormScan s;
  s.p = p;
  s.dims = dims;
  std::vector<double> x, y;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const int n = dims[k];
    auto r = sample_radial_values(BodySpec::lp_cone(p, n), N, substream_seed(seed, k, 7), opt);
    for (double& v : r) v *= std::sqrt(static_cast<double>(n));
    const auto ms = stats::mean_stderr(r);
    s.mean_norm.push_back(ms.mean);
    s.std_error.push_back(ms.std_error);
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(std::log(ms.mean));
  }
  const auto f = stats::linear_fit(x, y);
  s.slope = f.slope;
  s.prefactor = std::exp(f.intercept);
  return s;
}

// ---- serialization -------------------------------------------------------------

inline io::json to_json(const ConcentrationProfile& p) {
  io::json prov;
  prov["family"] = p.provenance.family;
  prov["dimensions"] = p.provenance.dimensions;
  prov["u_min"] = io::number(p.provenance.u_min);
  prov["u_max"] = io::number(p.provenance.u_max);
  prov["residual"] = io::number(p.provenance.residual);
  prov["method"] = p.provenance.method;
  return {{"A", io::number(p.A)}, {"B", io::number(p.B)}, {"alpha", io::number(p.alpha)},
          {"beta", io::number(p.beta)}, {"provenance", prov}};
}

inline ConcentrationProfile profile_from_json(const io::json& j) {
  ConcentrationProfile p;
  try {
    p.A = j.at("A").get<double>();
    p.B = j.at("B").get<double>();
    p.alpha = j.at("alpha").get<double>();
    p.beta = j.at("beta").get<double>();
    if (j.contains("provenance")) {
      const auto& v = j["provenance"];
      p.provenance.family = v.value("family", "");
      p.provenance.dimensions = v.value("dimensions", std::vector<int>{});
      p.provenance.method = v.value("method", "");
      if (v.contains("u_min") && v["u_min"].is_number()) p.provenance.u_min = v["u_min"].get<double>();
      if (v.contains("u_max") && v["u_max"].is_number()) p.provenance.u_max = v["u_max"].get<double>();
      if (v.contains("residual") && v["residual"].is_number()) p.provenance.residual = v["residual"].get<double>();
    }
  } catch (const io::json::exception& e) {
    throw domain_error(std::string("malformed profile JSON: ") + e.what());
  }
  detail::require(p.A > 0.0 && p.B > 0.0, "profile requires A, B > 0");
  return p;
}

inline const std::vector<std::string> kDeviationCsvHeader{"n", "u", "p_hat", "stderr"};

inline io::CsvTable deviation_table(const std::vector<DeviationCurve>& curves) {
  io::CsvTable t(kDeviationCsvHeader);
  for (const auto& c : curves) {
    for (const auto& p : c.points) t.add_row({static_cast<long long>(c.n), p.u, p.p_hat, p.std_error});
  }
  return t;
}

/// Groups the rows of a deviation CSV back into per-dimension curves.
inline std::vector<DeviationCurve> read_deviation_csv(std::istream& in) {
  const auto d = io::read_csv(in);
  const auto cn = d.column("n"), cu = d.column("u"), cp = d.column("p_hat"), cs = d.column("stderr");
  std::map<int, DeviationCurve> by_n;
  for (const auto& row : d.rows) {
    const int n = static_cast<int>(io::parse_double(row[cn]));
    auto& c = by_n[n];
    c.n = n;
    c.points.push_back({io::parse_double(row[cu]), io::parse_double(row[cp]), io::parse_double(row[cs]), 0});
  }
  std::vector<DeviationCurve> out;
  for (auto& [n, c] : by_n) out.push_back(std::move(c));
  return out;
}

}  // namespace tailscope
