#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "hgkt/corpus.hpp"
#include "hgkt/heg.hpp"
#include "hgkt/hgnn.hpp"
#include "hgkt/seq_model.hpp"

namespace hgkt {

struct ModelConfig {
  std::size_t exer_dim = 64;
  std::size_t schema_dim = 30;
  std::size_t input_dim = 100;
  std::size_t hidden = 200;
  std::size_t window = 20;
  GnnLayout layout;
  SchemaPreset preset = SchemaPreset::both;
  bool attention = true;
  bool strict_eq14 = false;
  bool normalize_beta = false;
  bool mean_pool = false;
  double dropout = 0.5;

  bool operator==(const ModelConfig&) const = default;
};

nlohmann::json model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& doc);

/// Padded step-major batch: entry (t, b) lives at t * size + b.
struct Batch {
  std::size_t size = 0;
  std::size_t steps = 0;
  std::vector<std::size_t> exercise;
  std::vector<std::uint8_t> correct;
  std::vector<std::uint8_t> valid;

  static Batch from(std::span<const LearnerSequence> sequences);
  static Batch from(std::span<const LearnerSequence* const> sequences);
  /// Targets with a valid label, i.e. events after the first of each sequence.
  std::size_t target_count() const;
};

/// Optional instrumentation filled during a forward pass.
struct ForwardTrace {
  std::size_t predictions = 0;
  double max_abs_m_att = 0.0;
  double max_abs_m_f = 0.0;
  double max_alpha_sum_error = 0.0;
};

namespace nn {

template <typename T>
struct BatchOutput {
  Tensor<T> predictions;  // ((steps - 1) * size) x 1, step-major
  std::vector<T> labels;
  std::vector<T> mask;
  std::size_t count = 0;  // number of unmasked targets
};

/// Tracing state after some events of one or more learners.
template <typename T>
struct Cursor {
  LstmState<T> state;
  HistoryBuffer<T> history{0};
  Tensor<T> m_cur;
  std::size_t observed = 0;
};

/// HGNN schema encoder feeding the attention-augmented LSTM tracer.
template <typename T>
class HgktModel {
 public:
  HgktModel(ModelConfig config, const Heg& heg, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const Heg& heg() const { return heg_; }
  std::size_t knowledge_count() const { return heg_.knowledge_count(); }
  std::size_t schema_count() const { return heg_.schema_count(); }

  /// All parameters, encoder first, in a fixed order.
  std::vector<NamedTensor<T>> parameters() const;
  std::vector<Tensor<T>> parameter_tensors() const;

  SchemaEmbedding<T> encode_schemas() const { return encoder_.forward(); }

  /// Runs the whole batch: recomputes schema embeddings, unrolls the tracer
  /// and predicts every event after the first.
  BatchOutput<T> forward(const Batch& batch, bool train, std::mt19937_64& rng, ForwardTrace* trace = nullptr) const;
  /// Mean masked cross-entropy of a forward output.
  Tensor<T> loss(const BatchOutput<T>& out) const;

  Cursor<T> start(std::size_t batch) const;
  /// Feeds one event per row.
  void observe(Cursor<T>& cursor, std::span<const std::size_t> exercises, std::span<const std::uint8_t> correct,
               const SchemaEmbedding<T>& emb, bool train, std::mt19937_64& rng) const;
  /// Probability of answering each row's next exercise correctly.
  Tensor<T> predict_next(const Cursor<T>& cursor, std::span<const std::size_t> exercises,
                         const SchemaEmbedding<T>& emb, bool train, std::mt19937_64& rng,
                         ForwardTrace* trace = nullptr) const;
  /// Prediction for explicit (knowledge, schema embedding) targets.
  Tensor<T> predict_with(const Cursor<T>& cursor, std::span<const std::size_t> knowledge, const Tensor<T>& s_next,
                         const SchemaEmbedding<T>& emb, bool train, std::mt19937_64& rng,
                         ForwardTrace* trace = nullptr) const;
  /// Repeats row 0 of a single-learner cursor `rows` times.
  Cursor<T> broadcast(const Cursor<T>& cursor, std::size_t rows) const;

 private:
  HgktModel(ModelConfig config, const Heg& heg, std::mt19937_64&& rng);

  ModelConfig config_;
  Heg heg_;
  SchemaEncoder<T> encoder_;
  SeqModel<T> seq_;
};

}  // namespace nn
}  // namespace hgkt
