#pragma once

#include <stdexcept>
#include <string>

namespace tailscope {

/// Invalid arguments: dimension too small, t outside the support, bad weights.
class domain_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A bound or estimate was requested outside the parameter range where the
/// underlying inequality is stated.
class regime_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The data cannot support the requested estimate (too few exceedances,
/// no dynamic range in a deviation curve, ...).
class insufficient_data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw domain_error(message);
}

}  // namespace detail
}  // namespace tailscope
