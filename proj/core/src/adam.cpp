#include "hgkt/adam.hpp"

#include <cmath>
#include <string>

#include "hgkt/errors.hpp"

namespace hgkt::nn {

template <typename T>
Adam<T>::Adam(std::vector<Tensor<T>> params, AdamOptions options) : params_(std::move(params)), options_(options) {
  for (const auto& p : params_) {
    m_.emplace_back(p.size(), T(0));
    v_.emplace_back(p.size(), T(0));
  }
}

template <typename T>
void Adam<T>::step() {
  for (std::size_t p = 0; p < params_.size(); ++p) {
    for (T g : params_[p].grad()) {
      if (!std::isfinite(g)) throw NumericError("adam: non-finite gradient in parameter " + std::to_string(p));
    }
  }
  ++step_;
  const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(step_));
  const T b1 = static_cast<T>(options_.beta1), b2 = static_cast<T>(options_.beta2);
  for (std::size_t p = 0; p < params_.size(); ++p) {
    auto grad = params_[p].grad();
    auto value = params_[p].mutable_values();
    auto& m = m_[p];
    auto& v = v_[p];
    for (std::size_t k = 0; k < value.size(); ++k) {
      const T g = grad.empty() ? T(0) : grad[k];
      m[k] = b1 * m[k] + (T(1) - b1) * g;
      v[k] = b2 * v[k] + (T(1) - b2) * g * g;
      const double mhat = static_cast<double>(m[k]) / c1;
      const double vhat = static_cast<double>(v[k]) / c2;
      value[k] -= static_cast<T>(options_.lr * mhat / (std::sqrt(vhat) + options_.eps));
    }
  }
}

template <typename T>
void Adam<T>::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

template class Adam<float>;
template class Adam<double>;

}  // namespace hgkt::nn
