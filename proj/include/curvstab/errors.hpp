#pragma once

#include <stdexcept>
#include <string>

namespace curvstab {

/// Input outside a chart, unsupported dimension, bad parameter value.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed configuration or surface description.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver failed to converge, or a numeric invariant broke.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace curvstab
