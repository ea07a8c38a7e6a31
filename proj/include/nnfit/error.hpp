#pragma once

#include <stdexcept>
#include <string>

namespace nnfit {

// Base of every error raised by the library. The CLI maps the subclasses
// to exit codes: configuration problems -> 2, data problems -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or off-manifold data.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Parameter outside its admissible range (alpha, J, n, level, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Operation not defined for the requested combination.
class Unsupported : public Error {
 public:
  using Error::Error;
};

// Inconsistent run configuration, e.g. a missing critical value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace nnfit
