#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hgkt/corpus.hpp"
#include "hgkt/embedding.hpp"
#include "hgkt/trainer.hpp"

namespace hgkt {

/// Synthetic learners practising exercises grouped into latent schemas.
/// Answers follow sigmoid(ability[l][s] - difficulty[s]); every practice of
/// schema s adds `learn_rate_gain` to ability[l][s].
struct SimConfig {
  std::size_t n_learners = 500;
  std::size_t n_exercises = 50;
  std::size_t n_knowledge = 5;
  std::size_t n_true_schemas = 10;
  std::size_t seq_len = 30;
  std::size_t embed_dim = 32;
  double learn_rate_gain = 0.1;
  double noise_sigma = 0.5;        // expected L2 norm of the embedding noise
  std::uint64_t seed = 1;
  double ability_sd = 1.0;         // learner-level ability spread
  double schema_ability_sd = 1.0;  // learner x schema ability spread
  double difficulty_sd = 1.0;      // schema difficulty spread
  double stay_prob = 0.6;          // chance the next event stays on the same schema
  std::size_t knowledge_per_schema = 2;

  void validate() const;
};

/// Unknown keys are rejected.
SimConfig sim_config_from_json(const nlohmann::json& doc);
nlohmann::json sim_config_to_json(const SimConfig& config);
SimConfig load_sim_config(const std::filesystem::path& path);

struct GroundTruth {
  std::vector<std::string> exercise_ids;
  std::vector<std::string> learner_ids;
  std::vector<std::size_t> schema_of;
  std::vector<std::size_t> knowledge_of;
  std::vector<double> difficulty;              // per schema
  std::vector<std::vector<double>> ability;    // initial, learner x schema
  double gain = 0.0;
  std::vector<std::vector<double>> centroids;  // per schema
};

nlohmann::json ground_truth_to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const nlohmann::json& doc);
GroundTruth load_ground_truth(const std::filesystem::path& path);

struct SimulatedData {
  ExerciseCorpus corpus;
  InteractionLog log;
  EmbeddingTable embeddings;
  GroundTruth truth;
};

SimulatedData generate(const SimConfig& config);

/// exercises.jsonl, logs.jsonl, embeddings.bin, ground_truth.json.
void write_simulation(const std::filesystem::path& dir, const SimulatedData& data);

/// Predictions of the generating process itself, replayed from each
/// learner's first event. Scores every event after the first of sequences
/// with at least `min_length` events.
Evaluation bayes_ceiling(const GroundTruth& truth, std::span<const LearnerSequence> sequences,
                         const Interner& learner_ids, const Interner& exercise_ids, std::size_t min_length = 3);

}  // namespace hgkt
