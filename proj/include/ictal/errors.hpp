#pragma once

#include <stdexcept>

namespace ictal {

// Bad run configuration: unknown config keys, invalid split parameters,
// sets missing from a problem, directories that do not hold signal files.
// Mapped to CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data: non-numeric sample lines, signals shorter than the
// expected length, degenerate (zero-power) inputs. CLI exit code 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss. CLI exit code 4.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dimension mismatch between tensors that must agree.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace ictal
