#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hgkt/corpus.hpp"
#include "hgkt/heg.hpp"
#include "hgkt/model.hpp"
#include "hgkt/schema_cluster.hpp"

namespace hgkt {

/// q(i, j): number of exercises with knowledge i and schema j.
struct QCounts {
  std::size_t knowledge = 0;
  std::size_t schemas = 0;
  std::vector<std::size_t> q;

  std::size_t at(std::size_t i, std::size_t j) const { return q[i * schemas + j]; }
  std::size_t total() const;
};

QCounts q_counts(std::span<const std::size_t> knowledge_of, std::size_t knowledge_count,
                 const AssignmentMatrix& assignment);
QCounts q_counts(const ExerciseCorpus& corpus, const AssignmentMatrix& assignment);
QCounts q_counts(const Heg& heg);

/// Predicted correctness for every (knowledge, schema) pair after t events.
struct KsMatrix {
  std::size_t knowledge = 0;
  std::size_t schemas = 0;
  std::vector<double> values;  // row-major knowledge x schema
  std::size_t t = 0;
  std::string learner_id;

  double at(std::size_t i, std::size_t j) const { return values[i * schemas + j]; }
};

/// Feeds `history` through the tracer and queries v_next = one-hot(i),
/// s_next = M_sc column j for every pair.
KsMatrix ks_matrix(const nn::HgktModel<float>& model, std::span<const InteractionEvent> history);

/// One matrix per prefix length 1..|history|.
std::vector<KsMatrix> mastery_trajectory(const nn::HgktModel<float>& model, std::span<const InteractionEvent> history);

/// Row-normalised q (d^k); rows with no exercises stay all zero. Each
/// non-zero row sums to exactly 1.0 in index order.
std::vector<double> knowledge_weights(const QCounts& q);
/// Column-normalised q (d^s); columns with no exercises stay all zero.
std::vector<double> schema_weights(const QCounts& q);

/// R_k[i] = sum_j R_ks[i][j] d^k[i][j]; empty for knowledge without exercises.
std::vector<std::optional<double>> knowledge_mastery(const KsMatrix& r_ks, const QCounts& q);
/// R_s[j] = sum_i R_ks[i][j] d^s[i][j]; empty for schemas without exercises.
std::vector<std::optional<double>> schema_mastery(const KsMatrix& r_ks, const QCounts& q);

/// {"learner_id", "t", "knowledge_ids", "schema_ids", "R_ks", "R_k", "R_s"};
/// marginals are keyed by id and omit absent entries.
nlohmann::json diagnosis_json(const KsMatrix& r_ks, const QCounts& q, std::span<const std::string> knowledge_ids,
                              std::span<const std::string> schema_ids);
/// Header "knowledge_id,<schema ids...>", one row per knowledge.
void write_ks_csv(const std::filesystem::path& path, const KsMatrix& r_ks, std::span<const std::string> knowledge_ids,
                  std::span<const std::string> schema_ids);

}  // namespace hgkt
