#pragma once

#include <string>
#include <vector>

namespace tailscope {

/// Where a fitted profile came from.
struct ProfileProvenance {
  std::string family;          // free-form label of the measure family
  std::vector<int> dimensions;
  double u_min = 0.0;
  double u_max = 0.0;
  double residual = 0.0;       // max |log P_fit - log P_hat| over the fitted points
  std::string method;          // "fit", "transfer:cone", "manual", ...
};

/// Norm concentration  P{ | |X|/sqrt(n) - 1 | >= u } <= A exp(-B n^alpha u^beta).
struct ConcentrationProfile {
  double A = 1.0;
  double B = 1.0;
  double alpha = 1.0;
  double beta = 2.0;
  ProfileProvenance provenance;
};

}  // namespace tailscope
