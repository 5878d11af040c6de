#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hgkt/tensor.hpp"

namespace hgkt::nn {

struct GradCheckOptions {
  double epsilon = 1e-5;
  std::size_t coordinates_per_tensor = 50;  // all coordinates when a tensor is smaller
  std::uint64_t seed = 0;
};

struct CoordinateError {
  std::size_t tensor = 0;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
  std::vector<std::size_t> per_tensor;  // compared coordinates per parameter
  std::size_t kinks = 0;                // skipped: the two steps took different relu/clamp branches
  CoordinateError worst;
};

/// Compares tape gradients of `loss` against central differences.
/// Coordinates whose +eps and -eps evaluations cross a relu or clamp
/// boundary are skipped and replaced by further random coordinates.
/// `loss` must rebuild the whole computation from the current parameter
/// values each time it is called and return a scalar.
GradCheckReport grad_check(const std::function<Tensor<double>()>& loss, std::vector<Tensor<double>> params,
                           GradCheckOptions options = {});

/// |a - b| / max(|a|, |b|, 1e-8).
double relative_error(double a, double b);

}  // namespace hgkt::nn
