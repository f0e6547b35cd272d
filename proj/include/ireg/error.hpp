#pragma once

#include <stdexcept>
#include <string>

namespace ireg {

// Invalid parameters, mismatched grids or geometries.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// An object was used before it reached the required state.
class StateError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

// Non-finite values or a collapsed (non-positive) Jacobian determinant.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace ireg
