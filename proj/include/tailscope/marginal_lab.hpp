#pragma once

// Finite-n experiments on marginals: the average marginal against the
// spherical and Gaussian laws, and sweeps over random directions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tailscope/body_samplers.hpp"
#include "tailscope/bv_transform.hpp"
#include "tailscope/concentration.hpp"
#include "tailscope/error.hpp"
#include "tailscope/io.hpp"
#include "tailscope/parallel.hpp"
#include "tailscope/refdist.hpp"
#include "tailscope/stats.hpp"

namespace tailscope {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Stream offsets that keep auxiliary draws apart from the sample stream.
inline constexpr std::uint64_t kThetaStream = 101;
inline constexpr std::uint64_t kDirectionStream = 202;

// ---- average marginal ----------------------------------------------------------

enum class AvgMethod { bv_from_radial, direct_mc };

inline std::string method_name(AvgMethod m) { return m == AvgMethod::bv_from_radial ? "bv_from_radial" : "direct_mc"; }

struct TailRatioRow {
  double t = 0.0;
  double empirical = 0.0;     // 1 - F^av(t), or f^av(t)
  double std_error = 0.0;
  double ref_sph = 0.0;       // 1 - Psi_n(t), or psi_n(t)
  double ref_gauss = 0.0;     // 1 - Phi(t), or phi(t)
  double ratio_sph = 0.0;
  double ratio_gauss = 0.0;
  double ratio_std_error = 0.0;  // of ratio_sph
  double theorem_bound = kNaN;   // NaN without a profile or outside its regime
};

struct TailRatioReport {
  std::string flavor = "tail";  // "tail" or "density"
  std::string method;
  BodySpec spec;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  std::optional<ConcentrationProfile> profile;
  std::vector<TailRatioRow> rows;

  int n() const { return spec.n; }
};

struct AvgOptions {
  std::optional<ConcentrationProfile> profile;
  TheoremConfig theorem;
  SampleOptions sampling;
  std::size_t min_exceedances = 50;  // direct_mc only
};

namespace detail {

inline std::vector<double> checked_grid(std::span<const double> t_grid, int n) {
  detail::require(!t_grid.empty(), "t grid is empty");
  std::vector<double> t(t_grid.begin(), t_grid.end());
  std::sort(t.begin(), t.end());
  for (double v : t) {
    detail::require(v >= 0.0 && v < std::sqrt(static_cast<double>(n)), "t must lie in [0, sqrt(n))");
  }
  return t;
}

inline void fill_reference(TailRatioRow& r, const SphericalMarginal& sph, bool density) {
  r.ref_sph = density ? sph.density(r.t) : sph.tail(r.t);
  r.ref_gauss = density ? special::gauss_density(r.t) : special::gauss_tail(r.t);
  r.ratio_sph = r.empirical / r.ref_sph;
  r.ratio_gauss = r.empirical / r.ref_gauss;
  r.ratio_std_error = r.std_error / r.ref_sph;
}

inline double bound_or_nan(const std::optional<ConcentrationProfile>& p, int n, double t, const TheoremConfig& cfg) {
  if (!p || t <= 0.0) return kNaN;
  try {
    return theorem_bound(*p, n, t, cfg);
  } catch (const regime_error&) {
    return kNaN;
  }
}

/// Counts of <X, theta> > t with a fresh uniform theta for every sample.
inline std::vector<std::size_t> direct_counts(const BodySpec& spec, std::span<const double> t, std::size_t N,
                                              std::uint64_t seed, const SampleOptions& opt) {
  const std::size_t n = static_cast<std::size_t>(spec.n);
  auto parts = map_sample_chunks<std::vector<std::size_t>>(
      spec, N, seed, opt, [&](std::span<const double> rows, std::size_t count, std::size_t c) {
        Engine rng(substream_seed(seed, c, opt.stream + kThetaStream));
        std::normal_distribution<double> g;
        std::vector<double> theta(n);
        std::vector<std::size_t> k(t.size(), 0);
        for (std::size_t i = 0; i < count; ++i) {
          double nn = 0.0, dot = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            theta[j] = g(rng);
            nn += theta[j] * theta[j];
            dot += theta[j] * rows[i * n + j];
          }
          const double y = dot / std::sqrt(nn);
          for (std::size_t a = 0; a < t.size(); ++a) k[a] += y > t[a];
        }
        return k;
      });
  std::vector<std::size_t> total(t.size(), 0);
  for (const auto& p : parts) {
    for (std::size_t a = 0; a < t.size(); ++a) total[a] += p[a];
  }
  return total;
}

}  // namespace detail

/// 1 - F^av on a grid, by the Brehm-Voigt sum over the sampled radial law
/// (default) or by direct Monte Carlo with a fresh direction per sample.
inline TailRatioReport estimate_avg_tail(const BodySpec& spec, std::span<const double> t_grid, std::size_t N,
                                         std::uint64_t seed, AvgMethod method = AvgMethod::bv_from_radial,
                                         const AvgOptions& opt = {}) {
  detail::require(spec.n >= 3, "average-marginal estimates require n >= 3");
  detail::require(N >= 2, "estimate_avg_tail requires N >= 2");
  const auto t = detail::checked_grid(t_grid, spec.n);
  const SphericalMarginal sph(spec.n);
  TailRatioReport rep{"tail", method_name(method), spec, N, seed, opt.profile, {}};
  if (method == AvgMethod::bv_from_radial) {
    const auto radial = sample_radial(spec, N, seed, opt.sampling);
    for (double v : t) {
      const auto e = avg_tail_estimate(radial, v);
      TailRatioRow r;
      r.t = v;
      r.empirical = e.value;
      r.std_error = e.std_error;
      detail::fill_reference(r, sph, false);
      r.theorem_bound = detail::bound_or_nan(opt.profile, spec.n, v, opt.theorem);
      rep.rows.push_back(r);
    }
    return rep;
  }
  const auto counts = detail::direct_counts(spec, t, N, seed, opt.sampling);
  for (std::size_t a = 0; a < t.size(); ++a) {
    if (counts[a] < opt.min_exceedances) {
      throw insufficient_data_error("tail too deep for N: " + std::to_string(counts[a]) + " exceedances at t = " +
                                    io::format_double(t[a]));
    }
    TailRatioRow r;
    r.t = t[a];
    r.empirical = counts[a] / static_cast<double>(N);
    r.std_error = std::sqrt(r.empirical * (1.0 - r.empirical) / static_cast<double>(N));
    detail::fill_reference(r, sph, false);
    r.theorem_bound = detail::bound_or_nan(opt.profile, spec.n, t[a], opt.theorem);
    rep.rows.push_back(r);
  }
  return rep;
}

/// f^av on a grid by the exact Brehm-Voigt sum over the sampled radial law.
inline TailRatioReport estimate_avg_density(const BodySpec& spec, std::span<const double> t_grid, std::size_t N,
                                            std::uint64_t seed, const AvgOptions& opt = {}) {
  detail::require(spec.n >= 3, "average-marginal estimates require n >= 3");
  detail::require(N >= 2, "estimate_avg_density requires N >= 2");
  const auto t = detail::checked_grid(t_grid, spec.n);
  const SphericalMarginal sph(spec.n);
  const auto radial = sample_radial(spec, N, seed, opt.sampling);
  TailRatioReport rep{"density", method_name(AvgMethod::bv_from_radial), spec, N, seed, opt.profile, {}};
  for (double v : t) {
    const auto e = avg_density_estimate(radial, v);
    TailRatioRow r;
    r.t = v;
    r.empirical = e.value;
    r.std_error = e.std_error;
    detail::fill_reference(r, sph, true);
    rep.rows.push_back(r);
  }
  return rep;
}

// ---- directional marginals -------------------------------------------------------

enum class DirEstimator { conditional, indicator };

inline std::string estimator_name(DirEstimator e) { return e == DirEstimator::conditional ? "conditional" : "indicator"; }

/// Coordinate law of one coordinate of a product-structured spec, after
/// normalization; empty for specs without independent coordinates.
inline std::optional<CoordinateLaw> product_coordinate(const BodySpec& spec) {
  CoordinateLaw law;
  if (spec.kind == BodySpec::Kind::product) {
    law = spec.law;
  } else if (spec.kind == BodySpec::Kind::lp_volume && spec.p == kInf) {
    law = CoordinateLaw::uniform(1.0);
  } else {
    return std::nullopt;
  }
  law.scale /= spec.normalization;
  return law;
}

/// Per-direction, per-evaluation-point Monte Carlo means with standard errors.
struct DirectionalEstimates {
  std::size_t M = 0;
  std::size_t K = 0;
  std::vector<double> mean;       // M x K
  std::vector<double> std_error;  // M x K
  std::vector<double> sum;        // M x K, raw sums (exact counts for the indicator estimator)
  double at(std::size_t m, std::size_t k) const { return mean[m * K + k]; }
};

namespace detail {

inline double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    s0 += a[j] * b[j];
    s1 += a[j + 1] * b[j + 1];
    s2 += a[j + 2] * b[j + 2];
    s3 += a[j + 3] * b[j + 3];
  }
  for (; j < n; ++j) s0 += a[j] * b[j];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace detail

/// Estimates E term_k(<X, xi_m>) for M directions (rows of `dirs`, M x n) and
/// K evaluation points. With points x_k and weights, the per-sample term is
///   sum_k' w_{k,k'} S(x_{k'}),  S(x) = 1{<X, xi> > x} or its conditional
/// expectation given all coordinates but the one with the largest |xi_j|.
/// Tails use one unit weight; centered-bin densities use +-1/h.
struct EvalPoint {
  std::vector<std::pair<double, double>> terms;  // (x, weight)
};

inline DirectionalEstimates directional_estimates(const BodySpec& spec, std::span<const double> dirs,
                                                  const std::vector<EvalPoint>& points, std::size_t N,
                                                  std::uint64_t seed, DirEstimator estimator,
                                                  const SampleOptions& opt = {}) {
  const std::size_t n = static_cast<std::size_t>(spec.n);
  detail::require(!dirs.empty() && dirs.size() % n == 0, "directions must be an M x n array");
  detail::require(N >= 2, "directional estimates require N >= 2");
  const std::size_t M = dirs.size() / n, K = points.size();
  const auto law = product_coordinate(spec);
  if (estimator == DirEstimator::conditional && !law) {
    throw domain_error("the conditional estimator needs a product-structured spec; use the indicator estimator");
  }
  std::vector<std::size_t> pivot(M, 0);
  for (std::size_t m = 0; m < M; ++m) {
    const double* d = dirs.data() + m * n;
    pivot[m] = static_cast<std::size_t>(std::max_element(d, d + n, [](double a, double b) {
                                          return std::abs(a) < std::abs(b);
                                        }) - d);
  }
  struct Partial {
    std::vector<double> s, s2;
  };
  auto parts = map_sample_chunks<Partial>(
      spec, N, seed, opt, [&](std::span<const double> rows, std::size_t count, std::size_t) {
        Partial p{std::vector<double>(M * K, 0.0), std::vector<double>(M * K, 0.0)};
        for (std::size_t i = 0; i < count; ++i) {
          const double* x = rows.data() + i * n;
          for (std::size_t m = 0; m < M; ++m) {
            const double* d = dirs.data() + m * n;
            const double y = detail::dot(x, d, n);
            double rest = 0.0, w = 1.0;
            if (estimator == DirEstimator::conditional) {
              const std::size_t j = pivot[m];
              rest = y - d[j] * x[j];
              w = std::abs(d[j]);
            }
            for (std::size_t k = 0; k < K; ++k) {
              double v = 0.0;
              for (const auto& [at, weight] : points[k].terms) {
                const double s = estimator == DirEstimator::indicator ? (y > at ? 1.0 : 0.0) : law->survival((at - rest) / w);
                v += weight * s;
              }
              p.s[m * K + k] += v;
              p.s2[m * K + k] += v * v;
            }
          }
        }
        return p;
      });
  DirectionalEstimates out;
  out.M = M;
  out.K = K;
  out.sum.assign(M * K, 0.0);
  std::vector<double> s2(M * K, 0.0);
  for (const auto& p : parts) {
    for (std::size_t a = 0; a < M * K; ++a) {
      out.sum[a] += p.s[a];
      s2[a] += p.s2[a];
    }
  }
  const double dN = static_cast<double>(N);
  out.mean.resize(M * K);
  out.std_error.resize(M * K);
  for (std::size_t a = 0; a < M * K; ++a) {
    const double mu = out.sum[a] / dN;
    out.mean[a] = mu;
    out.std_error[a] = std::sqrt(std::max(0.0, s2[a] / dN - mu * mu) / (dN - 1.0));
  }
  return out;
}

struct DirectionTailRow {
  double t = 0.0;
  double tail = 0.0;  // P{<X, xi> > t}
  double std_error = 0.0;
  std::size_t exceedances = 0;  // indicator estimator only
};

/// 1 - F^xi(t) along one fixed unit direction.
inline std::vector<DirectionTailRow> direction_tail(const BodySpec& spec, std::span<const double> xi,
                                                    std::span<const double> t_grid, std::size_t N, std::uint64_t seed,
                                                    DirEstimator estimator = DirEstimator::indicator,
                                                    const SampleOptions& opt = {}) {
  detail::require(xi.size() == static_cast<std::size_t>(spec.n), "direction has the wrong dimension");
  detail::require(std::abs(lp_norm(xi, 2.0) - 1.0) < 1e-9, "direction must be a unit vector");
  std::vector<EvalPoint> pts;
  for (double t : t_grid) pts.push_back({{{t, 1.0}}});
  const auto est = directional_estimates(spec, xi, pts, N, seed, estimator, opt);
  std::vector<DirectionTailRow> rows;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    DirectionTailRow r{t_grid[k], est.mean[k], est.std_error[k], 0};
    if (estimator == DirEstimator::indicator) r.exceedances = static_cast<std::size_t>(std::llround(est.sum[k]));
    rows.push_back(r);
  }
  return rows;
}

// ---- direction sweeps --------------------------------------------------------------

struct DirectionRow {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double sup_deviation = kNaN;  // NaN when every grid point was excluded
  double argmax_t = kNaN;
  double std_error_at_argmax = kNaN;
  bool defined = false;
};

struct DirectionSweepReport {
  std::string flavor = "tail";  // "tail" or "density"
  std::string estimator;
  BodySpec spec;
  double T = 0.0;
  double bin_width = kNaN;      // density flavor only
  std::vector<double> t_grid;   // points with t <= T
  std::vector<double> excluded_t;  // deep tails left out of every sup
  std::size_t M = 0;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;         // average-marginal deviation on the same grid
  double threshold_factor = 10.0;
  double threshold = 0.0;
  double exceed_fraction = 0.0;
  double median_sup = kNaN;
  std::size_t undefined = 0;
  std::vector<DirectionRow> rows;
};

struct SweepOptions {
  /// conditional when the spec has independent coordinates, indicator otherwise
  std::optional<DirEstimator> estimator;
  double threshold_factor = 10.0;
  double min_expected = 50.0;  // grid points with N * reference mass below this are excluded
  SampleOptions sampling;
};

namespace detail {

inline std::vector<double> sweep_directions(int n, std::size_t M, std::uint64_t seed, std::vector<std::uint64_t>& seeds) {
  std::vector<double> dirs;
  dirs.reserve(M * static_cast<std::size_t>(n));
  for (std::size_t m = 0; m < M; ++m) {
    seeds.push_back(substream_seed(seed, m, kDirectionStream));
    const auto d = random_direction(n, seeds.back());
    dirs.insert(dirs.end(), d.begin(), d.end());
  }
  return dirs;
}

inline DirectionSweepReport run_sweep(const BodySpec& spec, double T, std::span<const double> t_grid, std::size_t M,
                                      std::size_t N, std::uint64_t seed, const SweepOptions& opt, double h) {
  const bool density = std::isfinite(h);
  detail::require(spec.n >= 3, "direction sweeps require n >= 3");
  detail::require(M >= 1 && N >= 2, "direction sweeps require M >= 1 and N >= 2");
  detail::require(!t_grid.empty(), "t grid is empty");
  detail::require(T <= *std::max_element(t_grid.begin(), t_grid.end()), "T must not exceed max(t_grid)");
  detail::require(std::abs(coordinate_sd(spec) / spec.normalization - 1.0) < 1e-9,
                  "direction sweeps need an isotropic spec (unit coordinate variance); use isotropic()");
  const DirEstimator est =
      opt.estimator.value_or(product_coordinate(spec) ? DirEstimator::conditional : DirEstimator::indicator);

  DirectionSweepReport rep;
  rep.flavor = density ? "density" : "tail";
  rep.estimator = estimator_name(est);
  rep.spec = spec;
  rep.T = T;
  rep.bin_width = density ? h : kNaN;
  rep.M = M;
  rep.N = N;
  rep.seed = seed;
  rep.threshold_factor = opt.threshold_factor;

  std::vector<double> used;
  for (double t : t_grid) {
    if (t < 0.0 || t > T) continue;
    const double mass = density ? special::gauss_density(t) * h : special::gauss_tail(t);
    (mass * static_cast<double>(N) < opt.min_expected ? rep.excluded_t : used).push_back(t);
  }
  std::sort(used.begin(), used.end());
  rep.t_grid = used;

  // average-marginal deviation on the same sample
  if (!used.empty()) {
    const auto radial = sample_radial(spec, N, seed, opt.sampling);
    for (double t : used) {
      const double ratio = density ? avg_density(radial, t) / special::gauss_density(t)
                                   : avg_tail(radial, t) / special::gauss_tail(t);
      rep.epsilon = std::max(rep.epsilon, std::abs(ratio - 1.0));
    }
  }
  rep.threshold = opt.threshold_factor * rep.epsilon;

  std::vector<std::uint64_t> seeds;
  const auto dirs = sweep_directions(spec.n, M, seed, seeds);
  std::vector<EvalPoint> pts;
  for (double t : used) {
    if (density) {
      pts.push_back({{{t - 0.5 * h, 1.0 / h}, {t + 0.5 * h, -1.0 / h}}});
    } else {
      pts.push_back({{{t, 1.0}}});
    }
  }
  DirectionalEstimates e;
  if (!pts.empty()) e = directional_estimates(spec, dirs, pts, N, seed, est, opt.sampling);

  std::vector<double> sups;
  std::size_t exceed = 0;
  for (std::size_t m = 0; m < M; ++m) {
    DirectionRow r;
    r.index = m;
    r.seed = seeds[m];
    for (std::size_t k = 0; k < used.size(); ++k) {
      const double ref = density ? special::gauss_density(used[k]) : special::gauss_tail(used[k]);
      const double dev = std::abs(e.at(m, k) / ref - 1.0);
      if (!r.defined || dev > r.sup_deviation) {
        r.sup_deviation = dev;
        r.argmax_t = used[k];
        r.std_error_at_argmax = e.std_error[m * e.K + k] / ref;
        r.defined = true;
      }
    }
    if (r.defined) {
      sups.push_back(r.sup_deviation);
      exceed += r.sup_deviation > rep.threshold;
    } else {
      ++rep.undefined;
    }
    rep.rows.push_back(r);
  }
  if (!sups.empty()) {
    rep.exceed_fraction = exceed / static_cast<double>(sups.size());
    rep.median_sup = stats::median(sups);
  }
  return rep;
}

}  // namespace detail

/// Per-direction sup_{t <= T} |(1 - F^xi(t))/(1 - Phi(t)) - 1| over M uniform
/// directions, and the fraction of directions above 10 eps, eps being the
/// average-marginal deviation measured on the same grid and sample.
inline DirectionSweepReport direction_sweep(const BodySpec& spec, double T, std::span<const double> t_grid,
                                            std::size_t M, std::size_t N, std::uint64_t seed,
                                            const SweepOptions& opt = {}) {
  return detail::run_sweep(spec, T, t_grid, M, N, seed, opt, kNaN);
}

/// Density flavor: centered bins (F(t + h/2) - F(t - h/2))/h against phi(t).
inline DirectionSweepReport local_direction_sweep(const BodySpec& spec, double T, double h,
                                                  std::span<const double> t_grid, std::size_t M, std::size_t N,
                                                  std::uint64_t seed, const SweepOptions& opt = {}) {
  detail::require(h > 0.0 && std::isfinite(h), "bin width must be positive");
  return detail::run_sweep(spec, T, t_grid, M, N, seed, opt, h);
}

// ---- corollary budget --------------------------------------------------------------

enum class BudgetMode { integral, local };

/// T = { c1 n eps^k / (log n + log 1/eps + log 1/zeta) }^{1/6}, k = 2 (integral)
/// or 4 (local).
inline double corollary_T_budget(double n, double eps, double zeta, BudgetMode mode, double c1 = 1.0) {
  detail::require(n > 1.0, "corollary_T_budget requires n > 1");
  detail::require(eps > 0.0 && eps <= 1.0 && zeta > 0.0 && zeta <= 1.0, "corollary_T_budget requires eps, zeta in (0, 1]");
  detail::require(c1 > 0.0, "corollary_T_budget requires c1 > 0");
  const double k = mode == BudgetMode::integral ? 2.0 : 4.0;
  const double denom = std::log(n) + std::log(1.0 / eps) + std::log(1.0 / zeta);
  return std::pow(c1 * n * std::pow(eps, k) / denom, 1.0 / 6.0);
}

// ---- serialization ----------------------------------------------------------------

inline io::json spec_json(const BodySpec& s) {
  io::json j{{"kind", s.kind_name()}, {"n", s.n}};
  if (s.kind == BodySpec::Kind::lp_cone || s.kind == BodySpec::Kind::lp_volume || s.kind == BodySpec::Kind::gen_gaussian) {
    j["p"] = io::number(s.p);
  }
  if (s.kind == BodySpec::Kind::product) {
    j["law"] = s.law.name();
    j["a"] = io::number(s.law.a);
    j["law_scale"] = io::number(s.law.scale);
  }
  j["normalization"] = io::number(s.normalization);
  return j;
}

inline io::json to_json(const TailRatioReport& r) {
  io::json rows = io::json::array();
  for (const auto& x : r.rows) {
    rows.push_back({{"t", io::number(x.t)}, {"empirical", io::number(x.empirical)}, {"stderr", io::number(x.std_error)},
                    {"ref_sph", io::number(x.ref_sph)}, {"ref_gauss", io::number(x.ref_gauss)},
                    {"ratio_sph", io::number(x.ratio_sph)}, {"ratio_gauss", io::number(x.ratio_gauss)},
                    {"ratio_stderr", io::number(x.ratio_std_error)}, {"theorem_bound", io::number(x.theorem_bound)}});
  }
  io::json j{{"report", "tail_ratio"}, {"flavor", r.flavor}, {"method", r.method}, {"spec", spec_json(r.spec)},
             {"N", r.N}, {"seed", r.seed}, {"normalization", io::number(r.spec.normalization)}};
  j["profile"] = r.profile ? to_json(*r.profile) : io::json(nullptr);
  j["rows"] = rows;
  return j;
}

inline io::CsvTable tail_ratio_table(const TailRatioReport& r) {
  io::CsvTable t({"t", "empirical", "stderr", "ref_sph", "ref_gauss", "ratio_sph", "ratio_gauss", "ratio_stderr",
                  "theorem_bound"});
  for (const auto& x : r.rows) {
    t.add_row({x.t, x.empirical, x.std_error, x.ref_sph, x.ref_gauss, x.ratio_sph, x.ratio_gauss, x.ratio_std_error,
               x.theorem_bound});
  }
  return t;
}

inline io::json to_json(const DirectionSweepReport& r) {
  io::json rows = io::json::array();
  for (const auto& x : r.rows) {
    rows.push_back({{"index", x.index}, {"direction_seed", x.seed}, {"sup_deviation", io::number(x.sup_deviation)},
                    {"argmax_t", io::number(x.argmax_t)}, {"stderr_at_argmax", io::number(x.std_error_at_argmax)},
                    {"defined", x.defined}});
  }
  return {{"report", "direction_sweep"},
          {"flavor", r.flavor},
          {"estimator", r.estimator},
          {"spec", spec_json(r.spec)},
          {"normalization", io::number(r.spec.normalization)},
          {"T", io::number(r.T)},
          {"bin_width", io::number(r.bin_width)},
          {"t_grid", io::numbers(r.t_grid)},
          {"excluded_t", io::numbers(r.excluded_t)},
          {"M", r.M},
          {"N", r.N},
          {"seed", r.seed},
          {"epsilon", io::number(r.epsilon)},
          {"threshold_factor", io::number(r.threshold_factor)},
          {"threshold", io::number(r.threshold)},
          {"exceed_fraction", io::number(r.exceed_fraction)},
          {"median_sup", io::number(r.median_sup)},
          {"undefined_directions", r.undefined},
          {"directions", rows}};
}

inline io::CsvTable sweep_table(const DirectionSweepReport& r) {
  io::CsvTable t({"index", "direction_seed", "sup_deviation", "argmax_t", "stderr_at_argmax", "defined"});
  for (const auto& x : r.rows) {
    t.add_row({static_cast<long long>(x.index), std::to_string(x.seed), x.sup_deviation, x.argmax_t,
               x.std_error_at_argmax, static_cast<long long>(x.defined)});
  }
  return t;
}

}  // namespace tailscope
