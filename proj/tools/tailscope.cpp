// tailscope: command-line front end.
//
// Exit codes: 0 ok, 1 runtime failure, 2 usage or validation error,
// 3 a verified inequality failed.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tailscope/tailscope.hpp"

namespace fs = std::filesystem;
using namespace tailscope;
using io::json;

namespace {

enum Exit { kOk = 0, kRuntime = 1, kUsage = 2, kVerifyFailed = 3 };

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Global {
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string format = "csv";
  std::string name;
  unsigned threads = 0;
  bool plot = false;
  std::vector<std::string> argv;
};

struct SpecFlags {
  std::string body = "sphere";
  std::string p = "2";
  int n = 0;
  std::string law = "uniform";
  double a = 1.0;
  std::string normalization = "isotropic";
};

struct GridFlags {
  std::string list;
  double t_min = 0.0;
  double t_max = std::nan("");
  int steps = 0;
};

double parse_p(const std::string& s) {
  if (s == "inf" || s == "infinity") return kInf;
  try {
    return io::parse_double(s);
  } catch (const domain_error&) {
    throw usage_error("--p must be a number >= 1 or `inf`, got `" + s + "`");
  }
}

BodySpec build_spec(const SpecFlags& f) {
  if (f.n <= 0) throw usage_error("--n is required");
  const double p = parse_p(f.p);
  BodySpec spec;
  if (f.body == "sphere") {
    spec = BodySpec::sphere(f.n);
  } else if (f.body == "lp-cone") {
    spec = BodySpec::lp_cone(p, f.n);
  } else if (f.body == "lp-volume") {
    spec = BodySpec::lp_volume(p, f.n);
  } else if (f.body == "gen-gaussian") {
    spec = BodySpec::gen_gaussian(p, f.n);
  } else if (f.body == "product") {
    CoordinateLaw law;
    if (f.law == "uniform") law = CoordinateLaw::uniform(f.a);
    else if (f.law == "rademacher") law = CoordinateLaw::rademacher();
    else if (f.law == "truncated-normal") law = CoordinateLaw::truncated_normal(f.a);
    else throw usage_error("unknown --law `" + f.law + "`");
    spec = BodySpec::product(law, f.n);
  } else {
    throw usage_error("unknown --body `" + f.body + "`");
  }
  if (f.normalization == "isotropic") return isotropic(spec);
  if (f.normalization == "raw") return spec;
  double c = 0.0;
  try {
    c = io::parse_double(f.normalization);
  } catch (const domain_error&) {
    throw usage_error("--normalization must be `isotropic`, `raw` or a positive number");
  }
  return spec.scaled(c);
}

void add_spec_flags(CLI::App* cmd, SpecFlags& f) {
  cmd->add_option("--body", f.body, "sphere | lp-cone | lp-volume | product | gen-gaussian")->capture_default_str();
  cmd->add_option("--p", f.p, "exponent p in [1, inf]; `inf` for the cube")->capture_default_str();
  cmd->add_option("--n", f.n, "dimension")->required();
  cmd->add_option("--law", f.law, "product coordinate law: uniform | rademacher | truncated-normal")
      ->capture_default_str();
  cmd->add_option("--a", f.a, "half-width or truncation point of the coordinate law")->capture_default_str();
  cmd->add_option("--normalization", f.normalization, "isotropic | raw | divide samples by this number")
      ->capture_default_str();
}

void add_grid_flags(CLI::App* cmd, GridFlags& g) {
  cmd->add_option("--t-grid", g.list, "comma-separated t values (overrides --t-min/--t-max/--steps)");
  cmd->add_option("--t-min", g.t_min, "first grid point")->capture_default_str();
  cmd->add_option("--t-max", g.t_max, "last grid point");
  cmd->add_option("--steps", g.steps, "number of grid points");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      v.push_back(io::parse_double(item));
    } catch (const domain_error&) {
      throw usage_error("bad number `" + item + "` in list");
    }
  }
  if (v.empty()) throw usage_error("empty list");
  return v;
}

std::vector<double> build_grid(const GridFlags& g, double default_max, int default_steps) {
  if (!g.list.empty()) return parse_list(g.list);
  const double hi = std::isnan(g.t_max) ? default_max : g.t_max;
  const int steps = g.steps > 0 ? g.steps : default_steps;
  if (!(std::isfinite(g.t_min) && std::isfinite(hi) && g.t_min < hi)) {
    throw usage_error("need t-min < t-max, got " + io::format_double(g.t_min) + " and " + io::format_double(hi));
  }
  if (steps < 2) throw usage_error("--steps must be >= 2");
  std::vector<double> t(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) t[static_cast<std::size_t>(k)] = g.t_min + (hi - g.t_min) * k / (steps - 1.0);
  return t;
}

std::uint64_t require_seed(const Global& g) {
  if (!g.seed) throw usage_error("--seed is required for stochastic commands");
  return *g.seed;
}

SampleOptions sampling(const Global& g) {
  SampleOptions o;
  o.threads = g.threads;
  return o;
}

/// One artifact plus its provenance sidecar. Paths are checked up front.
class Output {
 public:
  Output(const Global& g, const std::string& command, const std::string& ext = "")
      : g_(g), command_(command) {
    if (g.format != "csv" && g.format != "json") throw usage_error("--format must be csv or json");
    std::error_code ec;
    fs::create_directories(g.out, ec);
    if (!fs::is_directory(g.out)) throw usage_error("output directory `" + g.out + "` is not usable");
    const std::string stem = g.name.empty() ? command : g.name;
    path_ = fs::path(g.out) / (stem + "." + (ext.empty() ? g.format : ext));
    std::ofstream probe(path_, std::ios::app);
    if (!probe) throw usage_error("cannot write to `" + path_.string() + "`");
  }

  const fs::path& path() const { return path_; }
  bool csv() const { return g_.format == "csv"; }

  void write(const std::string& text, json parameters) const {
    io::write_text(path_, text);
    json side{{"tool", "tailscope"},
              {"version", io::kVersion},
              {"command", command_},
              {"argv", g_.argv},
              {"artifact", path_.filename().string()},
              {"format", g_.format},
              {"seed", g_.seed ? json(*g_.seed) : json(nullptr)},
              {"threads_requested", g_.threads},
              {"parameters", std::move(parameters)}};
    io::write_text(io::sidecar_path(path_), io::dump(side));
    std::cout << "wrote " << path_.string() << "\n";
  }

  void plot(const std::vector<io::Series>& s, const std::string& title, const std::string& x, const std::string& y,
            bool log_y = false) const {
    if (!g_.plot) return;
    auto svg = path_;
    svg.replace_extension(".svg");
    io::write_text(svg, io::svg_plot(s, title, x, y, log_y));
    std::cout << "wrote " << svg.string() << "\n";
  }

 private:
  const Global& g_;
  std::string command_;
  fs::path path_;
};

json spec_params(const SpecFlags& f, const BodySpec& spec) {
  json j = spec_json(spec);
  j["normalization_flag"] = f.normalization;
  return j;
}

// ---- commands -------------------------------------------------------------------

struct RefdistArgs {
  int n = 0;
  GridFlags grid;
};

int cmd_refdist(const Global& g, const RefdistArgs& a) {
  if (a.n < 3) throw usage_error("refdist requires --n >= 3");
  const SphericalMarginal sph(a.n);
  const auto t = build_grid(a.grid, std::min(4.0, sph.half_width()), 101);
  Output out(g, "refdist");
  io::CsvTable tab({"t", "sph_density", "sph_cdf", "sph_tail", "gauss_density", "gauss_cdf", "gauss_tail",
                    "density_ratio", "tail_ratio"});
  json rows = json::array();
  io::Series s1{"psi_n", {}, {}}, s2{"phi", {}, {}};
  for (double v : t) {
    const double d = sph.density(v), gd = gauss_density(v);
    const double tl = sph.tail(v), gt = gauss_tail(v);
    tab.add_row({v, d, sph.cdf(v), tl, gd, gauss_cdf(v), gt, d / gd, tl / gt});
    rows.push_back({{"t", v}, {"sph_density", d}, {"sph_cdf", sph.cdf(v)}, {"sph_tail", tl}, {"gauss_density", gd},
                    {"gauss_cdf", gauss_cdf(v)}, {"gauss_tail", gt}, {"density_ratio", io::number(d / gd)},
                    {"tail_ratio", io::number(tl / gt)}});
    s1.x.push_back(v), s1.y.push_back(d);
    s2.x.push_back(v), s2.y.push_back(gd);
  }
  json params{{"n", a.n}, {"t_grid", io::numbers(t)}};
  out.write(out.csv() ? tab.str() : io::dump({{"report", "refdist"}, {"n", a.n}, {"rows", rows}}), params);
  out.plot({s1, s2}, "spherical vs Gaussian density, n = " + std::to_string(a.n), "t", "density");
  return kOk;
}

struct SampleArgs {
  SpecFlags spec;
  std::size_t N = 0;
  bool binary = false;
};

int cmd_sample(const Global& g, const SampleArgs& a) {
  const auto spec = build_spec(a.spec);
  const auto seed = require_seed(g);
  if (a.N == 0) throw usage_error("--N must be positive");
  Output out(g, "sample", a.binary ? "tsb" : "");
  const auto b = sample(spec, a.N, seed, sampling(g));
  json params{{"spec", spec_params(a.spec, spec)}, {"N", a.N}, {"chunk_size", b.chunk_size}};
  if (a.binary) {
    std::ostringstream ss;
    write_batch_binary(b, ss);
    out.write(ss.str(), params);
    return kOk;
  }
  const auto n = static_cast<std::size_t>(spec.n);
  if (out.csv()) {
    std::vector<std::string> header;
    for (std::size_t j = 1; j <= n; ++j) header.push_back("x" + std::to_string(j));
    io::CsvTable tab(header);
    for (std::size_t i = 0; i < b.N; ++i) {
      std::vector<io::Cell> row(b.points.begin() + static_cast<std::ptrdiff_t>(i * n),
                                b.points.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
      tab.add_row(std::move(row));
    }
    out.write(tab.str(), params);
  } else {
    json pts = json::array();
    for (std::size_t i = 0; i < b.N; ++i) {
      pts.push_back(std::vector<double>(b.points.begin() + static_cast<std::ptrdiff_t>(i * n),
                                        b.points.begin() + static_cast<std::ptrdiff_t>((i + 1) * n)));
    }
    out.write(io::dump({{"report", "sample"}, {"spec", spec_json(spec)}, {"N", b.N}, {"seed", seed}, {"points", pts}}),
              params);
  }
  return kOk;
}

struct TransformArgs {
  std::string radial;
  int n = 0;
  GridFlags grid;
};

int cmd_transform(const Global& g, const TransformArgs& a) {
  std::ifstream in(a.radial);
  if (!in) throw usage_error("cannot read `" + a.radial + "`");
  Output out(g, "transform");
  const auto radial = read_radial_csv(in, a.n);
  const SphericalMarginal sph(a.n);
  const auto t = build_grid(a.grid, std::min(4.0, sph.half_width() * 0.99), 41);
  io::CsvTable tab({"t", "avg_tail", "avg_tail_stderr", "avg_density", "avg_density_stderr", "ref_sph_tail",
                    "ratio_sph", "ref_gauss_tail", "ratio_gauss", "term1", "term2", "term3"});
  json rows = json::array();
  io::Series rs{"(1-F_av)/(1-Psi_n)", {}, {}}, rg{"(1-F_av)/(1-Phi)", {}, {}};
  for (double v : t) {
    if (v < 0.0) throw usage_error("transform needs t >= 0");
    const auto e = avg_tail_estimate(radial, v);
    const auto d = avg_density_estimate(radial, v);
    const double st = sph.tail(v), gt = gauss_tail(v);
    ErrorTerms et{kNaN, kNaN, kNaN};
    if (v > 0.0 && 8.0 * v * v < a.n) et = error_terms(radial, v);
    tab.add_row({v, e.value, e.std_error, d.value, d.std_error, st, e.value / st, gt, e.value / gt, et.term1, et.term2,
                 et.term3});
    rows.push_back({{"t", v}, {"avg_tail", e.value}, {"avg_tail_stderr", e.std_error}, {"avg_density", d.value},
                    {"avg_density_stderr", d.std_error}, {"ref_sph_tail", st}, {"ratio_sph", io::number(e.value / st)},
                    {"ref_gauss_tail", gt}, {"ratio_gauss", io::number(e.value / gt)}, {"term1", io::number(et.term1)},
                    {"term2", io::number(et.term2)}, {"term3", io::number(et.term3)}});
    rs.x.push_back(v), rs.y.push_back(e.value / st);
    rg.x.push_back(v), rg.y.push_back(e.value / gt);
  }
  json params{{"radial", a.radial}, {"n", a.n}, {"radial_size", radial.size()}, {"t_grid", io::numbers(t)}};
  out.write(out.csv() ? tab.str() : io::dump({{"report", "transform"}, {"n", a.n}, {"rows", rows}}), params);
  out.plot({rs, rg}, "average-marginal tail ratios", "t", "ratio");
  return kOk;
}

struct DeviationArgs {
  SpecFlags spec;
  std::string dims;
  std::size_t N = 0;
};

int cmd_deviation(const Global& g, const DeviationArgs& a) {
  const auto seed = require_seed(g);
  if (a.N < 2) throw usage_error("--N must be >= 2");
  std::vector<int> dims;
  if (a.dims.empty()) {
    dims.push_back(a.spec.n);
  } else {
    for (double d : parse_list(a.dims)) dims.push_back(static_cast<int>(d));
  }
  std::vector<BodySpec> specs;
  for (int n : dims) {
    SpecFlags f = a.spec;
    f.n = n;
    specs.push_back(build_spec(f));
  }
  Output out(g, "deviation");
  std::vector<DeviationCurve> curves;
  std::vector<io::Series> series;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    curves.push_back(sample_deviation_curve(specs[k], a.N, substream_seed(seed, k, 0), sampling(g)));
    io::Series s{"n = " + std::to_string(specs[k].n), {}, {}};
    for (const auto& p : curves.back().points) s.x.push_back(p.u), s.y.push_back(p.p_hat);
    series.push_back(s);
  }
  json params{{"spec", spec_params(a.spec, specs.front())}, {"dims", dims}, {"N", a.N},
              {"per_dimension_seed", "substream_seed(seed, index, 0)"}};
  if (out.csv()) {
    out.write(deviation_table(curves).str(), params);
  } else {
    json cs = json::array();
    for (const auto& c : curves) {
      json pts = json::array();
      for (const auto& p : c.points) {
        pts.push_back({{"u", p.u}, {"p_hat", p.p_hat}, {"stderr", p.std_error}, {"count", p.count}});
      }
      cs.push_back({{"n", c.n}, {"N", c.N}, {"normalization", io::number(c.normalization)}, {"points", pts}});
    }
    out.write(io::dump({{"report", "deviation"}, {"spec", spec_json(specs.front())}, {"seed", seed}, {"curves", cs}}),
              params);
  }
  out.plot(series, "norm deviation P{| |X|/sqrt(n) - 1 | >= u}", "u", "probability", true);
  return kOk;
}

struct FitArgs {
  std::vector<std::string> curves;
  std::string family;
};

int cmd_fit(const Global& g, const FitArgs& a) {
  std::vector<DeviationCurve> all;
  for (const auto& file : a.curves) {
    std::ifstream in(file);
    if (!in) throw usage_error("cannot read `" + file + "`");
    auto cs = read_deviation_csv(in);
    all.insert(all.end(), cs.begin(), cs.end());
  }
  Output out(g, "fit");
  const auto p = fit_profile(all, a.family);
  json params{{"curves", a.curves}, {"family", a.family}};
  if (out.csv()) {
    io::CsvTable tab({"A", "B", "alpha", "beta", "residual", "u_min", "u_max"});
    tab.add_row({p.A, p.B, p.alpha, p.beta, p.provenance.residual, p.provenance.u_min, p.provenance.u_max});
    out.write(tab.str(), params);
  } else {
    out.write(io::dump(to_json(p)), params);
  }
  std::cout << "A = " << p.A << "  B = " << p.B << "  alpha = " << p.alpha << "  beta = " << p.beta << "\n";
  return kOk;
}

struct AvgArgs {
  SpecFlags spec;
  std::size_t N = 0;
  GridFlags grid;
  std::string method = "bv";
  std::string profile;
  bool density = false;
};

int cmd_avgtail(const Global& g, const AvgArgs& a) {
  const auto spec = build_spec(a.spec);
  const auto seed = require_seed(g);
  if (a.method != "bv" && a.method != "direct") throw usage_error("--method must be bv or direct");
  if (a.density && a.method == "direct") throw usage_error("--density uses the radial transform only");
  const auto t = build_grid(a.grid, std::min(3.0, 0.99 * std::sqrt(spec.n)), 31);
  AvgOptions opt;
  opt.sampling = sampling(g);
  if (!a.profile.empty()) {
    std::ifstream in(a.profile);
    if (!in) throw usage_error("cannot read `" + a.profile + "`");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw usage_error(std::string("profile is not JSON: ") + e.what());
    }
    opt.profile = profile_from_json(j);
  }
  Output out(g, a.density ? "avgdensity" : "avgtail");
  const auto rep = a.density ? estimate_avg_density(spec, t, a.N, seed, opt)
                             : estimate_avg_tail(spec, t, a.N, seed,
                                                 a.method == "bv" ? AvgMethod::bv_from_radial : AvgMethod::direct_mc, opt);
  json params{{"spec", spec_params(a.spec, spec)}, {"N", a.N}, {"t_grid", io::numbers(t)}, {"method", rep.method},
              {"flavor", rep.flavor}, {"profile", a.profile}};
  out.write(out.csv() ? tail_ratio_table(rep).str() : io::dump(to_json(rep)), params);
  io::Series rs{"vs spherical", {}, {}}, rg{"vs Gaussian", {}, {}};
  for (const auto& r : rep.rows) rs.x.push_back(r.t), rs.y.push_back(r.ratio_sph), rg.x.push_back(r.t), rg.y.push_back(r.ratio_gauss);
  out.plot({rs, rg}, "average marginal ratios, " + spec.describe(), "t", "ratio");
  return kOk;
}

struct SweepArgs {
  SpecFlags spec;
  double T = 2.0;
  std::size_t M = 0;
  std::size_t N = 0;
  GridFlags grid;
  bool local = false;
  double h = 0.1;
  std::string estimator = "auto";
  double threshold_factor = 10.0;
};

int cmd_sweep(const Global& g, const SweepArgs& a) {
  const auto spec = build_spec(a.spec);
  const auto seed = require_seed(g);
  if (a.M == 0 || a.N < 2) throw usage_error("--M must be positive and --N >= 2");
  if (!(a.T > 0.0)) throw usage_error("--T must be positive");
  GridFlags grid = a.grid;
  if (std::isnan(grid.t_max)) grid.t_max = a.T;
  const auto t = build_grid(grid, a.T, static_cast<int>(std::lround(a.T / 0.1)) + 1);
  SweepOptions opt;
  opt.sampling = sampling(g);
  opt.threshold_factor = a.threshold_factor;
  if (a.estimator == "conditional") opt.estimator = DirEstimator::conditional;
  else if (a.estimator == "indicator") opt.estimator = DirEstimator::indicator;
  else if (a.estimator != "auto") throw usage_error("--estimator must be auto, conditional or indicator");
  Output out(g, a.local ? "local_sweep" : "sweep");
  const auto rep = a.local ? local_direction_sweep(spec, a.T, a.h, t, a.M, a.N, seed, opt)
                           : direction_sweep(spec, a.T, t, a.M, a.N, seed, opt);
  json params{{"spec", spec_params(a.spec, spec)}, {"T", a.T}, {"M", a.M}, {"N", a.N}, {"t_grid", io::numbers(t)},
              {"local", a.local}, {"bin_width", a.local ? json(a.h) : json(nullptr)}, {"estimator", rep.estimator},
              {"threshold_factor", a.threshold_factor}};
  out.write(out.csv() ? sweep_table(rep).str() : io::dump(to_json(rep)), params);
  std::cout << "epsilon = " << rep.epsilon << "  exceed_fraction = " << rep.exceed_fraction
            << "  median_sup = " << rep.median_sup << "\n";
  io::Series s{"sup deviation", {}, {}}, th{"threshold", {}, {}};
  for (const auto& r : rep.rows) {
    s.x.push_back(static_cast<double>(r.index)), s.y.push_back(r.sup_deviation);
    th.x.push_back(static_cast<double>(r.index)), th.y.push_back(rep.threshold);
  }
  out.plot({s, th}, "per-direction sup deviation", "direction", "sup |ratio - 1|");
  return kOk;
}

struct VerifyArgs {
  std::string lemma;
  bool all = false;
  std::optional<double> beta;
};

int cmd_verify(const Global& g, const VerifyArgs& a) {
  if (a.all == !a.lemma.empty()) throw usage_error("give exactly one of --lemma and --all");
  if (!a.all && std::find(verify::kLemmas.begin(), verify::kLemmas.end(), a.lemma) == verify::kLemmas.end()) {
    throw usage_error("unknown lemma `" + a.lemma + "`");
  }
  verify::Options opt;
  opt.beta = a.beta;
  opt.seed = g.seed.value_or(1);
  opt.threads = g.threads;
  Output out(g, "verify");
  const auto results = a.all ? verify::run_all(opt) : std::vector<verify::Result>{verify::run(a.lemma, opt)};
  bool ok = true;
  io::CsvTable tab({"lemma", "pass", "cells", "failures", "first_failure"});
  json arr = json::array();
  for (const auto& r : results) {
    ok = ok && r.pass();
    tab.add_row({r.name, static_cast<long long>(r.pass()), static_cast<long long>(r.cells),
                 static_cast<long long>(r.failures), r.first_failure});
    arr.push_back(verify::to_json(r));
    std::cout << r.name << ": " << (r.pass() ? "PASS" : "FAIL") << " (" << r.cells << " cells, " << r.failures
              << " failing)";
    if (!r.pass()) std::cout << "  first failing cell: " << r.first_failure;
    std::cout << "\n";
  }
  json params{{"lemmas", a.all ? json(verify::kLemmas) : json(a.lemma)}, {"beta", a.beta ? json(*a.beta) : json(nullptr)},
              {"seed_used", opt.seed}};
  out.write(out.csv() ? tab.str() : io::dump({{"report", "verify"}, {"results", arr}}), params);
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tailscope: spherical and Gaussian reference laws, average marginals and direction sweeps"};
  app.set_version_flag("--version", io::kVersion);
  app.require_subcommand(1);

  Global g;
  for (int i = 0; i < argc; ++i) g.argv.emplace_back(argv[i]);
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "64-bit seed (required by stochastic commands)");
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--format", g.format, "csv | json")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--name", g.name, "artifact file stem (default: the command name)");
  app.add_option("--threads", g.threads, "worker threads, 0 = TAILSCOPE_THREADS or all cores")->capture_default_str();
  app.add_flag("--plot", g.plot, "also write an SVG plot");
  app.fallthrough();

  RefdistArgs ra;
  auto* refdist = app.add_subcommand("refdist", "tabulate psi_n, Psi_n, phi, Phi and their ratios");
  refdist->add_option("--n", ra.n, "dimension (>= 3)")->required();
  add_grid_flags(refdist, ra.grid);

  SampleArgs sa;
  auto* sample_cmd = app.add_subcommand("sample", "draw points from a body specification");
  add_spec_flags(sample_cmd, sa.spec);
  sample_cmd->add_option("--N", sa.N, "number of points")->required();
  sample_cmd->add_flag("--binary", sa.binary, "write the little-endian TSB1 binary layout instead");

  TransformArgs ta;
  auto* transform = app.add_subcommand("transform", "average marginal of a radial CSV (column r_over_sqrt_n)");
  transform->add_option("--radial", ta.radial, "radial CSV file")->required();
  transform->add_option("--n", ta.n, "ambient dimension")->required();
  add_grid_flags(transform, ta.grid);

  DeviationArgs da;
  auto* deviation = app.add_subcommand("deviation", "norm-deviation curves across dimensions");
  add_spec_flags(deviation, da.spec);
  deviation->add_option("--dims", da.dims, "comma-separated dimensions (default: --n)");
  deviation->add_option("--N", da.N, "samples per dimension")->required();

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "fit a concentration profile to deviation CSVs");
  fit->add_option("--curves", fa.curves, "deviation CSV files (n,u,p_hat,stderr)")->required()->expected(1, -1);
  fit->add_option("--family", fa.family, "label stored with the profile");

  AvgArgs aa;
  auto* avgtail = app.add_subcommand("avgtail", "average-marginal tail (or density) against the reference laws");
  add_spec_flags(avgtail, aa.spec);
  avgtail->add_option("--N", aa.N, "samples")->required();
  add_grid_flags(avgtail, aa.grid);
  avgtail->add_option("--method", aa.method, "bv | direct")->capture_default_str();
  avgtail->add_option("--profile", aa.profile, "profile JSON for the theorem bound column");
  avgtail->add_flag("--density", aa.density, "estimate the density instead of the tail");

  SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep", "per-direction marginal deviations over random directions");
  add_spec_flags(sweep, wa.spec);
  sweep->add_option("--T", wa.T, "largest t in the sup")->capture_default_str();
  sweep->add_option("--M", wa.M, "number of directions")->required();
  sweep->add_option("--N", wa.N, "samples")->required();
  add_grid_flags(sweep, wa.grid);
  sweep->add_flag("--local", wa.local, "compare densities (centered bins) instead of tails");
  sweep->add_option("--bin-width", wa.h, "bin width for --local")->capture_default_str();
  sweep->add_option("--estimator", wa.estimator, "auto | conditional | indicator")->capture_default_str();
  sweep->add_option("--threshold-factor", wa.threshold_factor, "threshold = factor * epsilon")->capture_default_str();

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "grid checks of the stated inequalities");
  verify_cmd->add_option("--lemma", va.lemma, "sph | sphder | logder | normal | lapl | sphere_conc | sc2v");
  verify_cmd->add_flag("--all", va.all, "run every check");
  verify_cmd->add_option("--beta", va.beta, "lapl: restrict to one beta");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*refdist) return cmd_refdist(g, ra);
    if (*sample_cmd) return cmd_sample(g, sa);
    if (*transform) return cmd_transform(g, ta);
    if (*deviation) return cmd_deviation(g, da);
    if (*fit) return cmd_fit(g, fa);
    if (*avgtail) return cmd_avgtail(g, aa);
    if (*sweep) return cmd_sweep(g, wa);
    if (*verify_cmd) return cmd_verify(g, va);
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const domain_error& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
