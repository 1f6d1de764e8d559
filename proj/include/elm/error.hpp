#pragma once

#include <stdexcept>
#include <string>

namespace elm {

/// Malformed or inconsistent input data (bad dimensions, unparsable files).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid configuration values (out-of-range parameters, bad variance split).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a trustworthy answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace elm
