#pragma once

// Empirical envelopes for constants that the underlying lemmas only assert
// to exist. Each value was measured by a dense scan (rounded up) and is
// re-checked by `tailscope verify`.

namespace tailscope::fixtures {

/// sup of max(r, 1/r), r = (1 - Psi_n(t)) / (t^-1 psi_n(t)),
/// n = 16..4096 (powers of two), t in [1, sqrt(n/8)]. Measured: 1.52504.
inline constexpr double kSphderC = 1.53;

/// Range of sph_shift_ratio over n = 8..4096, u in [0, 1],
/// 2 (1+u)^2 t^2 < n. Measured: [0.625000, 2.224979].
inline constexpr double kLogderLow = 0.62;
inline constexpr double kLogderHigh = 2.23;

/// Constant C in the average-marginal error decomposition,
/// |ratio - 1| <= TERM1 + C t^2 (TERM2 + TERM3). Twice kSphderC.
inline constexpr double kBv2C = 2.0 * kSphderC;

/// sup over t in [1, 10], s in [0, t] of (1 - Phi(t - s)) / ((1 - Phi(t)) e^{st}).
/// Measured: 1.19593 at t = 1, s ~ 0.70.
inline constexpr double kNormalShiftC = 1.2;

/// Defaults for the average-marginal theorem envelope C t^{2 max(beta,1)} n^-alpha,
/// valid while t^{2 max(beta,1)} n^-alpha < c.
inline constexpr double kTheoremC = 1.0;
inline constexpr double kTheoremRegime = 0.5;

/// Isotropic normalization of B_infinity^n: coordinates uniform on [-1, 1]
/// have standard deviation 1/sqrt(3).
inline constexpr double kCubeCoordinateSd = 0.57735026918962576;

}  // namespace tailscope::fixtures
