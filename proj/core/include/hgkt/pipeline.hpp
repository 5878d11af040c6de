#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hgkt/corpus.hpp"
#include "hgkt/embedding.hpp"
#include "hgkt/heg.hpp"
#include "hgkt/metrics.hpp"
#include "hgkt/simgen.hpp"
#include "hgkt/trainer.hpp"

namespace hgkt {

/// Corpus, aligned embeddings and a learner-level split.
struct Dataset {
  ExerciseCorpus corpus;
  EmbeddingTable embeddings;
  Interner learner_ids;
  std::vector<LearnerSequence> train;
  std::vector<LearnerSequence> test;
  std::optional<GroundTruth> truth;
};

Dataset dataset_from_simulation(const SimulatedData& sim, double split_ratio, std::uint64_t split_seed);

/// Without an embedding file the deterministic fallback embedder is used
/// (dimension `fallback_dim`, seeded with `split_seed`).
Dataset load_dataset(const std::filesystem::path& exercises, const std::filesystem::path& logs,
                     const std::optional<std::filesystem::path>& embeddings, double split_ratio,
                     std::uint64_t split_seed, std::size_t fallback_dim = 64);

struct HegOptions {
  GraphMethod method = GraphMethod::support;
  std::optional<double> omega;  // unset: pick omega for target_ratio
  double target_ratio = 3.5;
  double lambda = 4.0;
  double lambda_p = kDefaultLambdaP;
  std::size_t summary_top_k = 2;
};

HegOptions heg_options(const TrainConfig& config);

/// Bottom graph by the chosen method, clustering cut at lambda, schema
/// descriptions when the corpus has text.
Heg build_heg(const ExerciseCorpus& corpus, const EmbeddingTable& embeddings,
              std::span<const LearnerSequence> train_seqs, const HegOptions& options);

struct RunRecord {
  std::string run_id;
  std::string preset;
  std::uint64_t seed = 0;
  Metrics metrics;
  std::vector<EpochStats> epochs;
  std::size_t schema_count = 0;
  double omega = 0.0;
};

/// Builds the graph from the training split, trains, evaluates on the test split.
RunRecord run_experiment(const TrainConfig& config, const Dataset& data, std::string run_id = {});

/// Header run_id,preset,seed,auc,acc,mae,rmse,n.
void write_metrics_csv(const std::filesystem::path& path, std::span<const RunRecord> runs);

enum class SweepAxis { omega, lambda, window, gnn_layers };
SweepAxis parse_sweep_axis(std::string_view name);
std::string_view to_string(SweepAxis axis);
TrainConfig apply_axis(TrainConfig config, SweepAxis axis, std::string_view value);

/// The eight B-i_T-j layer layouts swept by default.
std::vector<std::string> default_layer_grid();

/// One run per (value, seed); `data_for_seed` is called once per seed.
std::vector<RunRecord> sweep(SweepAxis axis, std::span<const std::string> values, const TrainConfig& base,
                             const std::function<Dataset(std::uint64_t seed)>& data_for_seed,
                             const std::function<void(const RunRecord&)>& on_run = {});

}  // namespace hgkt
