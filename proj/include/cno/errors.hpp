#pragma once

#include <stdexcept>
#include <string>

namespace cno {

// Dimension or layout mismatch between a network/matrix and its input.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite value produced during evaluation. When the failure is tied to
// a collocation point, `index` identifies it (-1 otherwise).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg, long index = -1)
      : std::runtime_error(msg), index(index) {}
  long index;
};

// Invalid configuration (bad key, bad value, degenerate domain, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File could not be opened or read.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File was readable but does not match the expected versioned format.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A metric whose denominator vanishes (e.g. zero signal energy).
struct UndefinedMetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A documented precondition of an operation was violated.
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cno
