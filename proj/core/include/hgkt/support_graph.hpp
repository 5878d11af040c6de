#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hgkt/corpus.hpp"
#include "hgkt/embedding.hpp"

namespace hgkt {

inline constexpr double kDefaultLambdaP = 0.01;

/// counts(i, j, ri, rj): number of sequences in which the first attempt at
/// exercise i (answered ri) precedes the first attempt at j (answered rj).
class SupportCounts {
 public:
  explicit SupportCounts(std::size_t exercise_count = 0);

  std::size_t size() const { return n_; }
  std::uint32_t operator()(std::size_t i, std::size_t j, int ri, int rj) const {
    return counts_[index(i, j, ri, rj)];
  }
  std::uint32_t& at(std::size_t i, std::size_t j, int ri, int rj) { return counts_[index(i, j, ri, rj)]; }
  /// Sum over all four answer combinations for the ordered pair.
  std::uint32_t pair_total(std::size_t i, std::size_t j) const;

  /// Associative element-wise merge; sizes must match.
  void merge(const SupportCounts& other);
  bool operator==(const SupportCounts& other) const = default;

 private:
  std::size_t index(std::size_t i, std::size_t j, int ri, int rj) const {
    return ((i * n_ + j) * 2 + static_cast<std::size_t>(ri)) * 2 + static_cast<std::size_t>(rj);
  }
  std::size_t n_ = 0;
  std::vector<std::uint32_t> counts_;
};

SupportCounts count_ordered_pairs(std::span<const LearnerSequence> sequences, std::size_t exercise_count);

/// Smoothed conditional estimates feeding the support value.
struct SupportTerms {
  double right_given_right = 1.0;       // P(R_i | R_j)
  double right_given_any = 1.0;         // P(R_i | R_j, W_j)
  double wrong_given_wrong = 1.0;       // P(W_j | W_i)
  double wrong_given_any = 1.0;         // P(W_j | R_i, W_i)
  double value = 0.0;
};

/// Sup(e_i -> e_j). The R-term reads counts where e_j came first, the W-term
/// counts where e_i came first; each ratio adds lambda_p once to numerator
/// and denominator. Zero on the diagonal.
SupportTerms support_terms(const SupportCounts& counts, std::size_t i, std::size_t j,
                           double lambda_p = kDefaultLambdaP);
double support_value(const SupportCounts& counts, std::size_t i, std::size_t j,
                     double lambda_p = kDefaultLambdaP);

enum class GraphMethod { knowledge, bertsim, transition, support };

std::string_view to_string(GraphMethod method);
GraphMethod parse_graph_method(std::string_view name);

/// Binary bottom graph. `weights` holds the pre-threshold score per ordered
/// pair for the thresholded methods.
struct DirectSupportGraph {
  std::size_t n = 0;
  std::vector<std::uint8_t> adjacency;
  std::optional<std::vector<double>> weights;
  GraphMethod method = GraphMethod::support;
  double omega = 0.0;

  bool edge(std::size_t i, std::size_t j) const { return adjacency[i * n + j] != 0; }
  std::size_t edge_count() const;
  bool symmetric() const;
};

DirectSupportGraph build_support_graph(const SupportCounts& counts, double omega,
                                       double lambda_p = kDefaultLambdaP);
DirectSupportGraph build_knowledge_graph(const ExerciseCorpus& corpus);
DirectSupportGraph build_bertsim_graph(const EmbeddingTable& embeddings, double omega);
DirectSupportGraph build_transition_graph(std::span<const LearnerSequence> sequences,
                                          std::size_t exercise_count, double omega);

/// Re-threshold a scored graph: A[i][j] = 1 iff i != j and score > omega.
DirectSupportGraph threshold_scores(std::vector<double> scores, std::size_t n, GraphMethod method,
                                    double omega);

/// Score matrices behind each thresholded builder (n x n, row-major).
std::vector<double> support_scores(const SupportCounts& counts, double lambda_p = kDefaultLambdaP);
std::vector<double> bertsim_scores(const EmbeddingTable& embeddings);
std::vector<double> transition_scores(std::span<const LearnerSequence> sequences, std::size_t exercise_count);

double edge_node_ratio(const DirectSupportGraph& graph);

/// Picks omega >= 0 whose edge-to-node ratio is closest to `target_ratio`,
/// preferring the smaller omega on ties. Candidates are 0 and every distinct
/// non-negative off-diagonal score.
double select_omega(std::span<const double> scores, std::size_t n, double target_ratio);

}  // namespace hgkt
