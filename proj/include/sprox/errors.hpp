#pragma once

#include <stdexcept>
#include <string>

namespace sprox {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite entries or otherwise malformed numerical input.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Operands whose block shapes do not match.
class ConformabilityError : public Error {
 public:
  using Error::Error;
};

// A constraint specification that cannot be realized (wrong block kind,
// sparsity larger than the dimension, ...).
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

// Out-of-range algorithm parameters (weights, step sizes, horizons).
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

// A point too close to (or beyond) the boundary of dom phi.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

// An iterative numerical routine failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration file problems; carries the offending line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace sprox
