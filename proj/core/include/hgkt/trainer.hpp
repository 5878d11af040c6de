#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "hgkt/corpus.hpp"
#include "hgkt/heg.hpp"
#include "hgkt/metrics.hpp"
#include "hgkt/model.hpp"
#include "hgkt/support_graph.hpp"

namespace hgkt {

struct TrainConfig {
  double lr = 0.01;
  std::size_t batch_size = 32;
  double dropout = 0.5;
  std::size_t epochs = 30;
  std::size_t patience = 5;  // early stop after this many epochs without improvement
  /// Share of training sequences held out for model selection. When positive,
  /// patience watches validation AUC and the best epoch's parameters are kept;
  /// otherwise it watches the training loss.
  double validation_fraction = 0.0;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;  // harness seed set; empty means {seed}
  std::size_t window = 20;
  std::size_t hidden = 200;
  std::size_t schema_dim = 30;
  std::size_t exer_dim = 64;
  std::size_t input_dim = 100;
  GnnLayout gnn_layers;
  GraphMethod graph_method = GraphMethod::support;
  std::optional<double> omega;  // unset: chosen to hit target_ratio
  double target_ratio = 3.5;
  double lambda = 4.0;
  double lambda_p = kDefaultLambdaP;
  SchemaPreset ablation_preset = SchemaPreset::both;
  bool attention = true;
  bool strict_eq14 = false;
  bool normalize_beta = false;
  bool mean_pool = false;
  double split_ratio = 0.8;
  std::size_t min_length = 3;
  std::size_t max_length = 200;

  ModelConfig model() const;
  SequenceLimits limits() const { return {min_length, max_length}; }
  std::vector<std::uint64_t> seed_set() const { return seeds.empty() ? std::vector<std::uint64_t>{seed} : seeds; }
  /// Throws ValidationError on non-positive sizes or out-of-range rates.
  void validate() const;
};

/// Unknown keys are rejected.
TrainConfig train_config_from_json(const nlohmann::json& doc);
nlohmann::json train_config_to_json(const TrainConfig& config);
TrainConfig load_train_config(const std::filesystem::path& path);

/// Preset label used in reports, e.g. "both+attention" or "none".
std::string preset_label(SchemaPreset preset, bool attention);

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;      // mean cross-entropy over the epoch's targets
  double wall_ms = 0.0;
  std::optional<double> validation_auc;
};

struct TrainResult {
  std::unique_ptr<nn::HgktModel<float>> model;
  std::vector<EpochStats> epochs;
  std::size_t best_epoch = 0;  // epoch whose parameters the model holds
  bool early_stopped = false;
};

/// End-to-end training of encoder and tracer with Adam. Throws NumericError
/// naming the epoch and batch when the loss stops being finite.
TrainResult train(const TrainConfig& config, const Heg& heg, std::span<const LearnerSequence> train_seqs,
                  const std::function<void(const EpochStats&)>& on_epoch = {});

struct Evaluation {
  Metrics metrics;
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
};

/// Next-step predictions for every event after the first of each prepared
/// sequence, pooled over all learners.
Evaluation evaluate(const nn::HgktModel<float>& model, std::span<const LearnerSequence> test_seqs,
                    std::size_t batch_size = 32, SequenceLimits limits = {});

}  // namespace hgkt
