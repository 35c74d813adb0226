#pragma once

// Grid checks of the stated inequalities. Each check walks a fixed grid,
// counts cells, and keeps the first failing cell verbatim.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tailscope/concentration.hpp"
#include "tailscope/fixtures.hpp"
#include "tailscope/io.hpp"
#include "tailscope/laplace.hpp"
#include "tailscope/parallel.hpp"
#include "tailscope/refdist.hpp"

namespace tailscope::verify {

inline const std::vector<std::string> kLemmas{"sph", "sphder", "logder", "normal", "lapl", "sphere_conc", "sc2v"};

struct Options {
  std::optional<double> beta;  // lapl only: restrict to one beta
  std::uint64_t seed = 1;      // Monte Carlo and random-point cells
  unsigned threads = 0;
};

struct Result {
  explicit Result(std::string lemma = "") : name(std::move(lemma)) {}

  std::string name;
  std::size_t cells = 0;
  std::size_t failures = 0;
  std::string first_failure;
  io::json notes = io::json::object();  // measured constants and extremes

  bool pass() const { return failures == 0; }

  void check(bool ok, const std::string& cell) {
    ++cells;
    if (ok) return;
    if (failures++ == 0) first_failure = cell;
  }
};

inline io::json to_json(const Result& r) {
  return {{"lemma", r.name},     {"pass", r.pass()},
          {"cells", r.cells},    {"failures", r.failures},
          {"first_failure", r.pass() ? io::json(nullptr) : io::json(r.first_failure)},
          {"notes", r.notes}};
}

namespace detail {

inline std::string cell(std::initializer_list<std::pair<const char*, double>> kv, const std::string& what) {
  std::string s;
  for (const auto& [k, v] : kv) s += std::string(k) + "=" + io::format_double(v) + " ";
  return s + what;
}

inline double ratio_sup(int n, double top) {
  const SphericalMarginal sph(n);
  double sup = 0.0;
  for (int k = 0; k <= 2000; ++k) {
    const double t = top * k / 2000.0;
    sup = std::max(sup, std::abs(std::exp(sph.log_density(t) - special::gauss_log_density(t)) - 1.0));
  }
  return sup;
}

}  // namespace detail

/// Spherical vs Gaussian density: |log(psi_n/phi) + t^4/(4n)| <= 2(t^2/n + t^6/n^2)
/// on 40 points of (0, n^0.3], and sup_{t <= n^0.2} |psi_n/phi - 1| decreasing in n.
inline Result sph(const Options& = {}) {
  Result r{"sph"};
  const int dims[] = {64, 256, 1024, 4096};
  double worst_corrected = 0.0;
  for (int n : dims) {
    const SphericalMarginal s(n);
    const double top = std::pow(static_cast<double>(n), 0.3);
    const double d0 = s.log_density(0.0) - special::gauss_log_density(0.0);
    for (int k = 1; k <= 40; ++k) {
      const double t = top * k / 40.0;
      const auto row = sph_gauss_row(s, t);
      r.check(std::abs(row.fourth_order) <= row.fourth_order_bound,
              detail::cell({{"n", n}, {"t", t}, {"D", row.fourth_order}, {"bound", row.fourth_order_bound}},
                           "fourth-order law"));
      worst_corrected = std::max(worst_corrected, std::abs(row.fourth_order - d0) / row.fourth_order_bound);
    }
  }
  r.notes["max_offset_corrected_ratio"] = worst_corrected;
  io::json sups = io::json::array();
  double prev = std::numeric_limits<double>::infinity();
  for (int n : dims) {
    const double sup = detail::ratio_sup(n, std::pow(static_cast<double>(n), 0.2));
    sups.push_back({{"n", n}, {"sup", sup}});
    r.check(sup < prev, detail::cell({{"n", n}, {"sup", sup}, {"previous", prev}}, "sup not decreasing"));
    prev = sup;
  }
  r.notes["sup_ratio_deviation"] = sups;
  return r;
}

/// (1 - Psi_n(t)) / (t^-1 psi_n(t)) within [1/C, C] for the recorded C, and
/// the analytic log-slope against central differences at random points.
inline Result sphder(const Options& opt = {}) {
  Result r{"sphder"};
  double sup = 0.0;
  for (int n = 16; n <= 4096; n *= 2) {
    const SphericalMarginal s(n);
    const double top = std::sqrt(n / 8.0);
    for (int k = 0; k <= 200; ++k) {
      const double t = 1.0 + (top - 1.0) * k / 200.0;
      const double q = std::exp(s.log_tail(t) - s.log_density(t) + std::log(t));
      const double m = std::max(q, 1.0 / q);
      sup = std::max(sup, m);
      r.check(m <= fixtures::kSphderC && m < 10.0,
              detail::cell({{"n", n}, {"t", t}, {"max(r,1/r)", m}}, "outside recorded envelope"));
    }
  }
  r.notes["sup_max_ratio"] = sup;
  r.notes["recorded_constant"] = fixtures::kSphderC;

  Engine rng(substream_seed(opt.seed, 0, 31));
  std::uniform_real_distribution<double> unit;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = static_cast<int>(std::round(std::exp(std::log(4.0) + unit(rng) * (std::log(4096.0) - std::log(4.0)))));
    const double t = unit(rng) * std::sqrt(n / 8.0);
    const SphericalMarginal s(n);
    const double h = 1e-4;
    const double fd = (s.log_density(t + h) - s.log_density(t - h)) / (2.0 * h);
    const double an = s.log_slope(t);
    const double err = std::abs(an) > 1e-3 ? std::abs(fd / an - 1.0) : std::abs(fd - an);
    worst = std::max(worst, err);
    r.check(err <= 1e-6, detail::cell({{"n", n}, {"t", t}, {"analytic", an}, {"fd", fd}}, "log-slope mismatch"));
  }
  r.notes["max_slope_rel_error"] = worst;
  return r;
}

/// sph_shift_ratio within the recorded positive envelope.
inline Result logder(const Options& = {}) {
  Result r{"logder"};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int n = 8; n <= 4096; n *= 2) {
    for (int j = 0; j <= 10; ++j) {
      const double u = j / 10.0;
      const double top = std::sqrt(n / 2.0) / (1.0 + u);
      for (int k = 1; k <= 40; ++k) {
        const double t = top * k / 41.0;
        const double v = sph_shift_ratio(n, t, u);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        r.check(v >= fixtures::kLogderLow && v <= fixtures::kLogderHigh,
                detail::cell({{"n", n}, {"t", t}, {"u", u}, {"ratio", v}}, "outside recorded envelope"));
      }
    }
  }
  r.notes["min_ratio"] = lo;
  r.notes["max_ratio"] = hi;
  r.notes["recorded_envelope"] = {fixtures::kLogderLow, fixtures::kLogderHigh};
  return r;
}

/// 1 - Phi(t - s) <= (1 - Phi(t)) e^{st} as stated, and 1 - Phi(t) <= t^-1 e^{-t^2/2} for t >= 1.
inline Result normal(const Options& = {}) {
  Result r{"normal"};
  double sup = 0.0;
  for (int i = 0; i <= 36; ++i) {
    const double t = 1.0 + 0.25 * i;
    for (int j = 0; j <= 20; ++j) {
      const double s = t * j / 20.0;
      const auto b = gauss_shift_bound(t, s);
      sup = std::max(sup, b.ratio());
      r.check(b.holds(), detail::cell({{"t", t}, {"s", s}, {"lhs", b.lhs}, {"rhs", b.rhs}}, "shift inequality"));
    }
    const double mills = special::log_gauss_tail(t) - (-0.5 * t * t - std::log(t));
    r.check(mills <= 0.0, detail::cell({{"t", t}}, "tail above t^-1 e^{-t^2/2}"));
  }
  r.notes["sup_shift_ratio"] = sup;
  r.notes["recorded_constant"] = fixtures::kNormalShiftC;
  r.check(sup <= fixtures::kNormalShiftC, detail::cell({{"sup", sup}}, "shift ratio above recorded constant"));
  return r;
}

/// Laplace integral: beta = 1 closed form, the explicit envelope for
/// beta <= 1, and a finite Case-1 sup for beta > 1.
inline Result lapl(const Options& opt = {}) {
  Result r{"lapl"};
  std::vector<double> betas{0.3, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0};
  if (opt.beta) betas = {*opt.beta};
  const std::vector<double> K{0.1, 0.3, 1.0, 2.0, 5.0, 10.0, 30.0, 100.0};
  const std::vector<double> L{0.5, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0, 1e4};
  io::json sups = io::json::array();
  for (double beta : betas) {
    if (beta == 1.0) {
      Engine rng(substream_seed(opt.seed, 0, 41));
      std::uniform_real_distribution<double> unit;
      for (int k = 0; k < 50; ++k) {
        const double Lk = std::exp(unit(rng) * std::log(1e4));
        const double Kk = unit(rng) * 0.5 * Lk;
        const double q = laplace::integral_I({Kk, Lk, 1.0});
        const double c = laplace::closed_form_beta1(Kk, Lk);
        r.check(std::abs(q - c) <= 1e-8 * std::max(1.0, std::abs(c)),
                detail::cell({{"K", Kk}, {"L", Lk}, {"quadrature", q}, {"closed_form", c}}, "beta=1 closed form"));
      }
    }
    const auto scan = laplace::scan_bound(beta, K, L);
    if (beta <= 1.0) {
      const double env = laplace::case2_envelope(beta);
      for (const auto& c : scan.cells) {
        r.check(c.ratio <= env, detail::cell({{"beta", beta}, {"K", c.params.K}, {"L", c.params.L}, {"ratio", c.ratio},
                                              {"envelope", env}},
                                             "Case-2 envelope"));
      }
    } else {
      r.check(std::isfinite(scan.sup_ratio) && !scan.cells.empty(),
              detail::cell({{"beta", beta}, {"sup", scan.sup_ratio}}, "Case-1 sup not finite"));
    }
    sups.push_back({{"beta", beta}, {"sup_ratio", io::number(scan.sup_ratio)}, {"regime_cells", scan.cells.size()}});
  }
  r.notes["scans"] = sups;
  return r;
}

/// Half-sphere extension: sigma(A)(1 - sigma(A_gamma)) <= exp(-(n-1) gamma^2/4)
/// on the analytic path, plus the Monte Carlo cross-check at (128, 0.5).
inline Result sphere_conc(const Options& opt = {}) {
  Result r{"sphere_conc"};
  std::vector<double> gammas;
  for (int k = 1; k <= 10; ++k) gammas.push_back(k / 10.0);
  for (int n : {8, 32, 128, 512}) {
    for (const auto& row : sphere_cap_check(n, gammas).rows) {
      r.check(row.holds, detail::cell({{"n", n}, {"gamma", row.gamma}, {"lhs", row.lhs}, {"rhs", row.rhs}}, "cap bound"));
    }
  }
  SampleOptions so;
  so.threads = opt.threads;
  const auto mc = sphere_cap_mc(128, 0.5, 100000, opt.seed, so);
  r.check(mc.agrees(), detail::cell({{"n", 128}, {"gamma", 0.5}, {"mc", mc.outside}, {"analytic", mc.analytic},
                                     {"z", mc.z}},
                                    "Monte Carlo disagrees"));
  r.notes["mc"] = {{"n", 128}, {"gamma", 0.5}, {"N", mc.N}, {"outside", mc.outside}, {"analytic", mc.analytic},
                   {"z", mc.z}};
  return r;
}

/// Cone-to-volume transfer. Volume radius = cone radius * U^{1/n}, so
///   P_vol{dev >= u} <= P_cone{dev >= u/2} + (1 - u/2)^n.
/// Checked on Monte Carlo curves (3 combined standard errors) and, in closed
/// form, for the Euclidean ball against the transferred profile.
inline Result sc2v(const Options& opt = {}) {
  Result r{"sc2v"};
  SampleOptions so;
  so.threads = opt.threads;
  const std::size_t N = 20000;
  const int n = 64;
  std::vector<double> u;
  for (int k = 1; k <= 12; ++k) u.push_back(0.05 * k);
  std::vector<double> half(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) half[k] = u[k] / 2.0;
  for (double p : {1.0, 4.0}) {
    const double C = coordinate_sd(BodySpec::lp_cone(p, n));
    const auto cone = sorted_deviations(sample_radial_values(BodySpec::lp_cone(p, n).scaled(C), N, opt.seed, so));
    const auto vol = sorted_deviations(sample_radial_values(BodySpec::lp_volume(p, n).scaled(C), N, opt.seed + 1, so));
    const auto cc = deviation_curve(cone, n, half);
    const auto vc = deviation_curve(vol, n, u);
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double rhs = cc.points[k].p_hat + std::pow(1.0 - half[k], n);
      const double se = std::hypot(cc.points[k].std_error, vc.points[k].std_error);
      r.check(vc.points[k].p_hat <= rhs + 3.0 * se,
              detail::cell({{"p", p}, {"n", n}, {"u", u[k]}, {"volume", vc.points[k].p_hat}, {"bound", rhs}},
                           "union bound"));
    }
  }
  // Euclidean ball: the cone measure has no deviation, so any profile holds for
  // it, and the volume deviation is exactly (1 - u)^n.
  const ConcentrationProfile profiles[] = {{1.0, 1.0, 1.0, 2.0, {}}, {2.0, 0.5, 0.5, 1.0, {}}, {1.0, 3.0, 2.0, 0.5, {}}};
  for (const auto& cp : profiles) {
    const auto vp = transfer_profile(cp, ProfileSource::cone);
    for (int m : {8, 64, 512}) {
      for (double uu : u) {
        const double lhs = std::pow(1.0 - uu, m);
        const double rhs = vp.A * std::exp(-vp.B * std::pow(m, vp.alpha) * std::pow(uu, vp.beta));
        r.check(lhs <= rhs, detail::cell({{"alpha", cp.alpha}, {"beta", cp.beta}, {"n", m}, {"u", uu}, {"lhs", lhs},
                                          {"rhs", rhs}},
                                         "ball transfer"));
      }
    }
  }
  return r;
}

inline Result run(const std::string& name, const Options& opt = {}) {
  if (name == "sph") return sph(opt);
  if (name == "sphder") return sphder(opt);
  if (name == "logder") return logder(opt);
  if (name == "normal") return normal(opt);
  if (name == "lapl") return lapl(opt);
  if (name == "sphere_conc") return sphere_conc(opt);
  if (name == "sc2v") return sc2v(opt);
  throw domain_error("unknown lemma `" + name + "`");
}

inline std::vector<Result> run_all(const Options& opt = {}) {
  std::vector<Result> out;
  for (const auto& name : kLemmas) out.push_back(run(name, opt));
  return out;
}

}  // namespace tailscope::verify
