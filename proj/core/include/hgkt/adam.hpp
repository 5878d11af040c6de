#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hgkt/tensor.hpp"

namespace hgkt::nn {

struct AdamOptions {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Moments are kept per parameter tensor in the
/// order the parameters were registered.
template <typename T>
class Adam {
 public:
  Adam(std::vector<Tensor<T>> params, AdamOptions options = {});

  /// Applies one update from the accumulated gradients. A parameter without
  /// a gradient is treated as having a zero gradient. Throws NumericError on
  /// a non-finite gradient before touching any parameter.
  void step();
  void zero_grad();

  std::int64_t steps() const { return step_; }
  const AdamOptions& options() const { return options_; }
  const std::vector<std::vector<T>>& first_moments() const { return m_; }
  const std::vector<std::vector<T>>& second_moments() const { return v_; }

 private:
  std::vector<Tensor<T>> params_;
  AdamOptions options_;
  std::vector<std::vector<T>> m_;
  std::vector<std::vector<T>> v_;
  std::int64_t step_ = 0;
};

}  // namespace hgkt::nn
