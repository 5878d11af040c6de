#pragma once

#include <stdexcept>
#include <string>

namespace hgkt {

/// Bad input: malformed files, out-of-range ids, inconsistent flags.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or dimension disagreement between tensors, checkpoints and graphs.
class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure during training (NaN loss or gradient).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hgkt
