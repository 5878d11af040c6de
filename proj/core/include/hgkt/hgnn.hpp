#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hgkt/heg.hpp"
#include "hgkt/tensor.hpp"

namespace hgkt {

/// Number of convolution layers below (B) and above (T) the pooling step,
/// written "B-3_T-1".
struct GnnLayout {
  std::size_t bottom = 3;
  std::size_t top = 1;

  std::string str() const;
  static GnnLayout parse(std::string_view text);
  bool operator==(const GnnLayout&) const = default;
};

/// Source of the per-exercise schema embedding s_e.
enum class SchemaPreset { none, direct_only, indirect_only, merge, both };

std::string_view to_string(SchemaPreset preset);
SchemaPreset parse_schema_preset(std::string_view name);

struct EncoderConfig {
  std::size_t exer_dim = 64;
  std::size_t schema_dim = 30;
  GnnLayout layout;
  SchemaPreset preset = SchemaPreset::both;
  bool mean_pool = false;

  /// Width of s_e: 2 * schema_dim for merge, schema_dim otherwise.
  std::size_t width() const { return preset == SchemaPreset::merge ? 2 * schema_dim : schema_dim; }
};

/// D^-1/2 (max(A, A^T) + I) D^-1/2 for a dense row-major n x n matrix.
std::vector<double> normalize_adjacency(std::span<const double> a, std::size_t n);

/// Binary adjacency of the bottom graph as doubles.
std::vector<double> adjacency_matrix(const DirectSupportGraph& graph);

namespace nn {

template <typename T>
struct NamedTensor {
  std::string name;
  Tensor<T> tensor;
};

/// relu(A_hat H W + b).
template <typename T>
Tensor<T> gcn_layer(const Tensor<T>& a_hat, const Tensor<T>& h, const Tensor<T>& w, const Tensor<T>& b);

template <typename T>
struct Pooled {
  Tensor<T> adjacency;  // S^T A S
  Tensor<T> features;   // S^T H
};

template <typename T>
Pooled<T> pool(const Tensor<T>& a_e, const Tensor<T>& h_e, const Tensor<T>& s_e);

template <typename T>
struct SchemaEmbedding {
  Tensor<T> exercise_rows;  // |E| x width, row i = s for exercise i
  Tensor<T> memory_rows;    // |S| x width, row j = column j of M_sc
};

/// Produces schema embeddings for one of the presets. For `both` this is the
/// two-level network: convolutions on the bottom graph, sum pooling through
/// the assignment matrix, convolutions on the schema graph.
template <typename T>
class SchemaEncoder {
 public:
  SchemaEncoder(EncoderConfig config, const Heg& heg, std::mt19937_64& rng);

  SchemaEmbedding<T> forward() const;

  const EncoderConfig& config() const { return config_; }
  std::size_t width() const { return config_.width(); }
  std::vector<NamedTensor<T>>& parameters() { return params_; }
  const std::vector<NamedTensor<T>>& parameters() const { return params_; }

 private:
  Tensor<T> bottom() const;
  Tensor<T> direct(const Tensor<T>& h) const;
  Tensor<T> indirect() const;
  Tensor<T> param(std::string_view name) const;

  EncoderConfig config_;
  std::size_t exercises_ = 0;
  std::size_t schemas_ = 0;
  std::vector<std::size_t> assign_;
  Tensor<T> a_e_hat_;
  Tensor<T> a_s_hat_;
  Tensor<T> pool_matrix_;  // S^T, or its row-normalised form for mean pooling
  std::vector<NamedTensor<T>> params_;
};

}  // namespace nn
}  // namespace hgkt
