#pragma once

// Exact samplers for the sphere, l_p cone and volume measures and
// coordinate-product laws.
//
// l_p balls use the Schechtman-Zinn representation: with g_i i.i.d. of
// density exp(-|t|^p) / (2 Gamma(1 + 1/p)), realized as |g| = W^{1/p},
// W ~ Gamma(1/p, 1), and an independent random sign,
//   V = G / |G|_p        is cone-measure distributed on the sphere of l_p^n,
//   U^{1/n} V            is uniform on B_p^n (U uniform on (0, 1)).
// B_infinity^n is sampled directly as a product of uniforms.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tailscope/bv_transform.hpp"
#include "tailscope/error.hpp"
#include "tailscope/parallel.hpp"
#include "tailscope/quadrature.hpp"
#include "tailscope/special.hpp"

namespace tailscope {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// |x|_p, scaled by the largest coordinate to avoid overflow.
inline double lp_norm(std::span<const double> x, double p) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (p == kInf || m == 0.0) return m;
  double s = 0.0;
  if (p == 2.0) {
    for (double v : x) s += (v / m) * (v / m);
    return m * std::sqrt(s);
  }
  for (double v : x) s += std::pow(std::abs(v) / m, p);
  return m * std::pow(s, 1.0 / p);
}

// ---- coordinate laws ---------------------------------------------------------

/// Even one-dimensional law for product measures: scale * Z with Z uniform
/// on [-a, a], Rademacher, or standard normal conditioned on [-a, a].
struct CoordinateLaw {
  enum class Kind { uniform, rademacher, truncated_normal };
  Kind kind = Kind::rademacher;
  double a = 1.0;
  double scale = 1.0;

  static CoordinateLaw uniform(double a) { return make(Kind::uniform, a); }
  static CoordinateLaw rademacher() { return make(Kind::rademacher, 1.0); }
  static CoordinateLaw truncated_normal(double a) { return make(Kind::truncated_normal, a); }

  std::string name() const {
    switch (kind) {
      case Kind::uniform: return "uniform";
      case Kind::rademacher: return "rademacher";
      case Kind::truncated_normal: return "truncated-normal";
    }
    return "?";
  }

  /// Variance of Z (before scaling).
  double base_variance() const {
    switch (kind) {
      case Kind::uniform: return a * a / 3.0;
      case Kind::rademacher: return 1.0;
      case Kind::truncated_normal: {
        const double mass = 1.0 - 2.0 * special::gauss_tail(a);
        return 1.0 - 2.0 * a * special::gauss_density(a) / mass;
      }
    }
    return 0.0;
  }

  double variance() const { return scale * scale * base_variance(); }

  /// The same law rescaled to unit variance.
  CoordinateLaw isotropic() const {
    CoordinateLaw c = *this;
    c.scale = 1.0 / std::sqrt(base_variance());
    return c;
  }

  double support_edge() const { return scale * a; }

  /// P{X >= x}.
  double tail(double x) const {
    const double z = x / scale;
    switch (kind) {
      case Kind::uniform:
        if (z <= -a) return 1.0;
        if (z > a) return 0.0;
        return (a - z) / (2.0 * a);
      case Kind::rademacher:
        if (z <= -1.0) return 1.0;
        if (z <= 1.0) return 0.5;
        return 0.0;
      case Kind::truncated_normal: {
        if (z <= -a) return 1.0;
        if (z > a) return 0.0;
        const double mass = 1.0 - 2.0 * special::gauss_tail(a);
        return (special::gauss_tail(z) - special::gauss_tail(a)) / mass;
      }
    }
    return 0.0;
  }

  /// P{X > x}; differs from tail() only at the atoms of the Rademacher law.
  double survival(double x) const {
    if (kind != Kind::rademacher) return tail(x);
    const double z = x / scale;
    if (z < -1.0) return 1.0;
    if (z < 1.0) return 0.5;
    return 0.0;
  }

  /// Smallest C with E exp(X^2 / C^2) <= 2.
  double psi2_constant() const {
    auto moment = [&](double c) {
      const double k = 1.0 / (c * c);
      switch (kind) {
        case Kind::rademacher: return std::exp(scale * scale * k);
        case Kind::uniform: {
          auto f = [&](double z) { return std::exp(scale * scale * z * z * k); };
          return quad::gauss_kronrod(f, 0.0, a, 1e-12).value / a;
        }
        case Kind::truncated_normal: {
          const double mass = 1.0 - 2.0 * special::gauss_tail(a);
          auto f = [&](double z) { return std::exp(scale * scale * z * z * k) * special::gauss_density(z); };
          return 2.0 * quad::gauss_kronrod(f, 0.0, a, 1e-12).value / mass;
        }
      }
      return kInf;
    };
    double lo = 1e-3 * support_edge(), hi = 10.0 * support_edge() + 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (moment(mid) > 2.0 ? lo : hi) = mid;
    }
    return hi;
  }

  template <class Rng>
  double sample(Rng& rng) const {
    switch (kind) {
      case Kind::uniform: return scale * std::uniform_real_distribution<double>(-a, a)(rng);
      case Kind::rademacher: return (rng() >> 63) ? scale : -scale;
      case Kind::truncated_normal: {
        if (a >= 1.0) {
          std::normal_distribution<double> g;
          for (;;) {
            const double z = g(rng);
            if (std::abs(z) <= a) return scale * z;
          }
        }
        // short interval: uniform proposal, accept with prob exp(-z^2/2)
        std::uniform_real_distribution<double> u(-a, a), v(0.0, 1.0);
        for (;;) {
          const double z = u(rng);
          if (v(rng) <= std::exp(-0.5 * z * z)) return scale * z;
        }
      }
    }
    return 0.0;
  }

 private:
  static CoordinateLaw make(Kind k, double a) {
    detail::require(std::isfinite(a) && a > 0.0, "coordinate law parameter must be positive and finite");
    CoordinateLaw c;
    c.kind = k;
    c.a = a;
    // built-in laws are bounded, hence sub-Gaussian; the check guards the numerics
    detail::require(std::isfinite(c.psi2_constant()), "coordinate law fails the psi2 moment check");
    return c;
  }
};

// ---- body specifications -----------------------------------------------------

struct BodySpec {
  enum class Kind { sphere, lp_cone, lp_volume, product, gen_gaussian };
  Kind kind = Kind::sphere;
  int n = 2;
  double p = 2.0;
  CoordinateLaw law;
  double normalization = 1.0;  // samples are divided by this; 1 = raw

  static BodySpec sphere(int n) { return checked({Kind::sphere, n, 2.0, {}, 1.0}); }
  static BodySpec lp_cone(double p, int n) { return checked({Kind::lp_cone, n, p, {}, 1.0}); }
  static BodySpec lp_volume(double p, int n) { return checked({Kind::lp_volume, n, p, {}, 1.0}); }
  static BodySpec product(CoordinateLaw law, int n) { return checked({Kind::product, n, 2.0, law, 1.0}); }
  static BodySpec gen_gaussian(double p, int n) { return checked({Kind::gen_gaussian, n, p, {}, 1.0}); }

  /// Divide samples by C.
  BodySpec scaled(double C) const {
    detail::require(std::isfinite(C) && C > 0.0, "normalization constant must be positive and finite");
    BodySpec s = *this;
    s.normalization = C;
    return s;
  }

  bool is_scaled() const { return normalization != 1.0; }

  std::string kind_name() const {
    switch (kind) {
      case Kind::sphere: return "sphere";
      case Kind::lp_cone: return "lp-cone";
      case Kind::lp_volume: return "lp-volume";
      case Kind::product: return "product";
      case Kind::gen_gaussian: return "gen-gaussian";
    }
    return "?";
  }

  std::string describe() const {
    std::string s = kind_name() + "(n=" + std::to_string(n);
    if (kind == Kind::lp_cone || kind == Kind::lp_volume || kind == Kind::gen_gaussian) {
      s += ", p=" + (p == kInf ? std::string("inf") : std::to_string(p));
    }
    if (kind == Kind::product) s += ", law=" + law.name() + ", a=" + std::to_string(law.a);
    return s + ")";
  }

 private:
  static BodySpec checked(BodySpec s) {
    detail::require(s.n >= 1, "body dimension must be >= 1");
    if (s.kind == Kind::sphere) detail::require(s.n >= 2, "sphere requires n >= 2");
    if (s.kind == Kind::lp_cone || s.kind == Kind::lp_volume || s.kind == Kind::gen_gaussian) {
      detail::require(s.p >= 1.0, "p must lie in [1, inf]");
    }
    if (s.kind == Kind::lp_cone || s.kind == Kind::gen_gaussian) {
      detail::require(s.p < kInf, "p = inf is handled by lp_volume or a product law");
    }
    return s;
  }
};

/// Standard deviation of one coordinate of the unscaled measure.
///
/// For the cone measure V = G/|G|_p, V is independent of |G|_p and
/// |G|_p^p ~ Gamma(n/p), so E g^2 = E V_1^2 E |G|_p^2 gives
///   E V_1^2 = Gamma(3/p) Gamma(n/p) / (Gamma(1/p) Gamma((n+2)/p)),
/// and the volume measure picks up E U^{2/n} = n/(n+2).
inline double coordinate_sd(const BodySpec& spec) {
  const double n = spec.n;
  const double p = spec.p;
  auto cone_var = [&] {
    return std::exp(std::lgamma(3.0 / p) + std::lgamma(n / p) - std::lgamma(1.0 / p) - std::lgamma((n + 2.0) / p));
  };
  switch (spec.kind) {
    case BodySpec::Kind::sphere: return 1.0 / std::sqrt(n);
    case BodySpec::Kind::gen_gaussian: return std::sqrt(std::exp(std::lgamma(3.0 / p) - std::lgamma(1.0 / p)));
    case BodySpec::Kind::lp_cone: return std::sqrt(cone_var());
    case BodySpec::Kind::lp_volume:
      if (p == kInf) return fixtures::kCubeCoordinateSd;
      return std::sqrt(cone_var() * n / (n + 2.0));
    case BodySpec::Kind::product: return std::sqrt(spec.law.variance());
  }
  return 1.0;
}

/// The spec rescaled so that every coordinate has unit variance.
inline BodySpec isotropic(const BodySpec& spec) { return spec.scaled(coordinate_sd(spec)); }

// ---- point generation ----------------------------------------------------------

/// Draws points of one spec from an engine. Holds the distribution objects
/// so a chunk constructs them once.
class PointSampler {
 public:
  explicit PointSampler(const BodySpec& spec) : spec_(spec), gamma_(spec.p < kInf ? 1.0 / spec.p : 1.0, 1.0) {}

  void draw(Engine& rng, std::span<double> x) {
    switch (spec_.kind) {
      case BodySpec::Kind::sphere:
        gaussian(rng, x);
        divide(x, lp_norm(x, 2.0));
        break;
      case BodySpec::Kind::gen_gaussian:
        gen_gaussian(rng, x);
        break;
      case BodySpec::Kind::lp_cone:
        cone(rng, x);
        break;
      case BodySpec::Kind::lp_volume:
        if (spec_.p == kInf) {
          for (double& v : x) v = unit_(rng) * 2.0 - 1.0;
        } else {
          cone(rng, x);
          const double r = std::pow(unit_(rng), 1.0 / spec_.n);
          for (double& v : x) v *= r;
        }
        break;
      case BodySpec::Kind::product:
        for (double& v : x) v = spec_.law.sample(rng);
        break;
    }
    if (spec_.normalization != 1.0) divide(x, spec_.normalization);
  }

 private:
  void gaussian(Engine& rng, std::span<double> x) {
    for (double& v : x) v = normal_(rng);
  }

  // W = |g|^p ~ Gamma(1/p, 1); exponential when p = 1
  double draw_w(Engine& rng) { return spec_.p == 1.0 ? expo_(rng) : gamma_(rng); }

  double magnitude(double w) const {
    if (spec_.p == 1.0) return w;
    if (spec_.p == 2.0) return std::sqrt(w);
    return std::pow(w, 1.0 / spec_.p);
  }

  /// Fills x with generalized-Gaussian coordinates and returns |x|_p^p.
  double gen_gaussian(Engine& rng, std::span<double> x) {
    double s = 0.0;
    for (double& v : x) {
      const double w = draw_w(rng);
      s += w;
      const double mag = magnitude(w);
      v = (rng() >> 63) ? mag : -mag;
    }
    return s;
  }

  void cone(Engine& rng, std::span<double> x) {
    for (;;) {
      const double s = gen_gaussian(rng, x);
      if (s > 0.0) {
        divide(x, magnitude(s));
        return;
      }
    }
  }

  static void divide(std::span<double> x, double c) {
    for (double& v : x) v /= c;
  }

  BodySpec spec_;
  std::normal_distribution<double> normal_;
  std::gamma_distribution<double> gamma_;
  std::exponential_distribution<double> expo_{1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

// ---- batches -------------------------------------------------------------------

struct SampleOptions {
  std::size_t chunk_size = 4096;
  unsigned threads = 0;
  std::uint64_t stream = 0;
};

/// N x n sample, row-major.
struct SampleBatch {
  BodySpec spec;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  std::size_t chunk_size = 0;
  std::uint64_t stream = 0;
  std::vector<std::uint64_t> substream_seeds;
  std::vector<double> points;

  int dim() const { return spec.n; }
  std::span<const double> row(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(spec.n), static_cast<std::size_t>(spec.n)};
  }
};

inline std::size_t chunk_count(std::size_t N, std::size_t chunk_size) { return (N + chunk_size - 1) / chunk_size; }

/// Streams the sample chunk by chunk: fn(rows, count, chunk_index) sees a
/// count x n row-major block and its return values come back in chunk order.
/// Chunks are independent, so peak memory is one block per worker.
template <class T, class F>
std::vector<T> map_sample_chunks(const BodySpec& spec, std::size_t N, std::uint64_t seed, const SampleOptions& opt,
                                 F&& fn) {
  detail::require(opt.chunk_size > 0, "chunk size must be positive");
  const std::size_t chunks = chunk_count(N, opt.chunk_size);
  const std::size_t n = static_cast<std::size_t>(spec.n);
  return map_indexed<T>(chunks, opt.threads, [&](std::size_t c) {
    const std::size_t begin = c * opt.chunk_size;
    const std::size_t count = std::min(N, begin + opt.chunk_size) - begin;
    std::vector<double> block(count * n);
    Engine rng(substream_seed(seed, c, opt.stream));
    PointSampler sampler(spec);
    for (std::size_t i = 0; i < count; ++i) sampler.draw(rng, {block.data() + i * n, n});
    return fn(std::span<const double>(block), count, c);
  });
}

inline SampleBatch sample(const BodySpec& spec, std::size_t N, std::uint64_t seed, const SampleOptions& opt = {}) {
  detail::require(N >= 1, "sample size must be >= 1");
  SampleBatch b;
  b.spec = spec;
  b.N = N;
  b.seed = seed;
  b.chunk_size = opt.chunk_size;
  b.stream = opt.stream;
  const std::size_t chunks = chunk_count(N, opt.chunk_size);
  for (std::size_t c = 0; c < chunks; ++c) b.substream_seeds.push_back(substream_seed(seed, c, opt.stream));
  b.points.resize(N * static_cast<std::size_t>(spec.n));
  const std::size_t n = static_cast<std::size_t>(spec.n);
  map_sample_chunks<int>(spec, N, seed, opt, [&](std::span<const double> rows, std::size_t, std::size_t c) {
    std::copy(rows.begin(), rows.end(), b.points.begin() + static_cast<std::ptrdiff_t>(c * opt.chunk_size * n));
    return 0;
  });
  return b;
}

inline SampleBatch sample_sphere(int n, std::size_t N, std::uint64_t seed, const SampleOptions& opt = {}) {
  return sample(BodySpec::sphere(n), N, seed, opt);
}
inline SampleBatch sample_gen_gaussian(double p, int n, std::size_t N, std::uint64_t seed,
                                       const SampleOptions& opt = {}) {
  return sample(BodySpec::gen_gaussian(p, n), N, seed, opt);
}
inline SampleBatch sample_cone_lp(double p, int n, std::size_t N, std::uint64_t seed, const SampleOptions& opt = {}) {
  return sample(BodySpec::lp_cone(p, n), N, seed, opt);
}
inline SampleBatch sample_volume_lp(double p, int n, std::size_t N, std::uint64_t seed,
                                    const SampleOptions& opt = {}) {
  return sample(BodySpec::lp_volume(p, n), N, seed, opt);
}
inline SampleBatch sample_product(const CoordinateLaw& law, int n, std::size_t N, std::uint64_t seed,
                                  const SampleOptions& opt = {}) {
  return sample(BodySpec::product(law, n), N, seed, opt);
}

/// |row|_2 / sqrt(n) for every row.
inline std::vector<double> radial_values(const SampleBatch& b) {
  std::vector<double> r(b.N);
  const double sn = std::sqrt(static_cast<double>(b.spec.n));
  for (std::size_t i = 0; i < b.N; ++i) r[i] = lp_norm(b.row(i), 2.0) / sn;
  return r;
}

inline RadialDistribution radial_projection(const SampleBatch& b) {
  detail::require(b.N >= 1, "radial_projection needs a nonempty batch");
  return RadialDistribution::empirical(b.spec.n, radial_values(b));
}

/// |X|_2 / sqrt(n) for N streamed samples, in sample order, without storing the points.
inline std::vector<double> sample_radial_values(const BodySpec& spec, std::size_t N, std::uint64_t seed,
                                                const SampleOptions& opt = {}) {
  const std::size_t n = static_cast<std::size_t>(spec.n);
  const double sn = std::sqrt(static_cast<double>(n));
  auto parts = map_sample_chunks<std::vector<double>>(
      spec, N, seed, opt, [&](std::span<const double> rows, std::size_t count, std::size_t) {
        std::vector<double> r(count);
        for (std::size_t i = 0; i < count; ++i) r[i] = lp_norm(rows.subspan(i * n, n), 2.0) / sn;
        return r;
      });
  std::vector<double> out;
  out.reserve(N);
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline RadialDistribution sample_radial(const BodySpec& spec, std::size_t N, std::uint64_t seed,
                                        const SampleOptions& opt = {}) {
  return RadialDistribution::empirical(spec.n, sample_radial_values(spec, N, seed, opt));
}

// ---- export --------------------------------------------------------------------

/// Binary layout: u32 magic "TSB1", u32 n, u64 N, then N*n f64, all little-endian.
inline constexpr std::uint32_t kBatchMagic = 0x31425354u;  // bytes 'T' 'S' 'B' '1'

namespace detail {

template <class T>
void put_le(std::ostream& out, T v) {
  unsigned char bytes[sizeof(T)];
  std::uint64_t u = 0;
  std::memcpy(&u, &v, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xffu);
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw domain_error("truncated binary batch");
  std::uint64_t u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  T v;
  std::memcpy(&v, &u, sizeof(T));
  return v;
}

}  // namespace detail

inline void write_batch_binary(const SampleBatch& b, std::ostream& out) {
  detail::put_le<std::uint32_t>(out, kBatchMagic);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(b.spec.n));
  detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(b.N));
  for (double v : b.points) detail::put_le<double>(out, v);
}

/// Reads the points of a binary batch as (n, N, row-major values).
struct RawBatch {
  std::uint32_t n = 0;
  std::uint64_t N = 0;
  std::vector<double> points;
};

inline RawBatch read_batch_binary(std::istream& in) {
  if (detail::get_le<std::uint32_t>(in) != kBatchMagic) throw domain_error("not a tailscope binary batch");
  RawBatch r;
  r.n = detail::get_le<std::uint32_t>(in);
  r.N = detail::get_le<std::uint64_t>(in);
  r.points.resize(static_cast<std::size_t>(r.n) * r.N);
  for (double& v : r.points) v = detail::get_le<double>(in);
  return r;
}

}  // namespace tailscope
