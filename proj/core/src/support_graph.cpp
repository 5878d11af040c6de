#include "hgkt/support_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hgkt/errors.hpp"

namespace hgkt {

SupportCounts::SupportCounts(std::size_t exercise_count)
    : n_(exercise_count), counts_(exercise_count * exercise_count * 4, 0) {}

std::uint32_t SupportCounts::pair_total(std::size_t i, std::size_t j) const {
  return (*this)(i, j, 0, 0) + (*this)(i, j, 0, 1) + (*this)(i, j, 1, 0) + (*this)(i, j, 1, 1);
}

void SupportCounts::merge(const SupportCounts& other) {
  if (other.n_ != n_) throw DimensionError("cannot merge support counts of different sizes");
  for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
}

SupportCounts count_ordered_pairs(std::span<const LearnerSequence> sequences, std::size_t exercise_count) {
  SupportCounts counts(exercise_count);
  std::vector<bool> seen(exercise_count, false);
  std::vector<std::pair<std::size_t, int>> firsts;
  for (const auto& seq : sequences) {
    firsts.clear();
    for (const auto& ev : seq.events) {
      if (ev.exercise >= exercise_count) {
        throw ValidationError("event references exercise index " + std::to_string(ev.exercise) +
                              " outside corpus of " + std::to_string(exercise_count));
      }
      if (seen[ev.exercise]) continue;
      seen[ev.exercise] = true;
      firsts.emplace_back(ev.exercise, ev.correct ? 1 : 0);
    }
    for (std::size_t a = 0; a < firsts.size(); ++a) {
      for (std::size_t b = a + 1; b < firsts.size(); ++b) {
        ++counts.at(firsts[a].first, firsts[b].first, firsts[a].second, firsts[b].second);
      }
    }
    for (const auto& f : firsts) seen[f.first] = false;
  }
  return counts;
}

SupportTerms support_terms(const SupportCounts& counts, std::size_t i, std::size_t j, double lambda_p) {
  if (!(lambda_p > 0.0)) throw ValidationError("lambda_p must be positive");
  SupportTerms t;
  if (i == j) return t;
  auto c = [&](std::size_t a, std::size_t b, int ra, int rb) { return static_cast<double>(counts(a, b, ra, rb)); };

  // e_j answered first, then e_i.
  t.right_given_right = (c(j, i, 1, 1) + lambda_p) / (c(j, i, 1, 0) + c(j, i, 1, 1) + lambda_p);
  t.right_given_any = (c(j, i, 0, 1) + c(j, i, 1, 1) + lambda_p) / (counts.pair_total(j, i) + lambda_p);
  // e_i answered first, then e_j.
  t.wrong_given_wrong = (c(i, j, 0, 0) + lambda_p) / (c(i, j, 0, 0) + c(i, j, 0, 1) + lambda_p);
  t.wrong_given_any = (c(i, j, 0, 0) + c(i, j, 1, 0) + lambda_p) / (counts.pair_total(i, j) + lambda_p);

  t.value = std::max(0.0, std::log(t.right_given_right / t.right_given_any)) +
            std::max(0.0, std::log(t.wrong_given_wrong / t.wrong_given_any));
  return t;
}

double support_value(const SupportCounts& counts, std::size_t i, std::size_t j, double lambda_p) {
  return support_terms(counts, i, j, lambda_p).value;
}

std::string_view to_string(GraphMethod method) {
  switch (method) {
    case GraphMethod::knowledge: return "knowledge";
    case GraphMethod::bertsim: return "bertsim";
    case GraphMethod::transition: return "transition";
    case GraphMethod::support: return "support";
  }
  return "support";
}

GraphMethod parse_graph_method(std::string_view name) {
  if (name == "knowledge") return GraphMethod::knowledge;
  if (name == "bertsim") return GraphMethod::bertsim;
  if (name == "transition") return GraphMethod::transition;
  if (name == "support") return GraphMethod::support;
  throw ValidationError("unknown graph method \"" + std::string(name) + "\"");
}

std::size_t DirectSupportGraph::edge_count() const {
  return static_cast<std::size_t>(std::count(adjacency.begin(), adjacency.end(), std::uint8_t{1}));
}

bool DirectSupportGraph::symmetric() const {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (edge(i, j) != edge(j, i)) return false;
  return true;
}

DirectSupportGraph threshold_scores(std::vector<double> scores, std::size_t n, GraphMethod method, double omega) {
  if (scores.size() != n * n) throw DimensionError("score matrix is not n x n");
  if (std::isnan(omega)) throw ValidationError("omega must be a number");
  // Cosine scores live in [-1, 1]; the other methods produce non-negative scores.
  if (omega < 0.0 && method != GraphMethod::bertsim) throw ValidationError("omega must be non-negative");
  DirectSupportGraph g;
  g.n = n;
  g.method = method;
  g.omega = omega;
  g.adjacency.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && scores[i * n + j] > omega) g.adjacency[i * n + j] = 1;
  g.weights = std::move(scores);
  return g;
}

std::vector<double> support_scores(const SupportCounts& counts, double lambda_p) {
  const std::size_t n = counts.size();
  std::vector<double> s(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s[i * n + j] = support_value(counts, i, j, lambda_p);
  return s;
}

std::vector<double> bertsim_scores(const EmbeddingTable& embeddings) {
  const std::size_t n = embeddings.size();
  std::vector<double> s(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      s[i * n + j] = s[j * n + i] = cosine_similarity(embeddings.row(i), embeddings.row(j));
  return s;
}

std::vector<double> transition_scores(std::span<const LearnerSequence> sequences, std::size_t exercise_count) {
  const std::size_t n = exercise_count;
  std::vector<double> counts(n * n, 0.0);
  for (const auto& seq : sequences) {
    for (std::size_t t = 1; t < seq.events.size(); ++t) {
      std::size_t a = seq.events[t - 1].exercise, b = seq.events[t].exercise;
      if (a >= n || b >= n) throw ValidationError("event references exercise outside corpus");
      counts[a * n + b] += 1.0;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t k = 0; k < n; ++k) row += counts[i * n + k];
    if (row == 0.0) continue;
    for (std::size_t k = 0; k < n; ++k) counts[i * n + k] /= row;
  }
  return counts;
}

DirectSupportGraph build_support_graph(const SupportCounts& counts, double omega, double lambda_p) {
  return threshold_scores(support_scores(counts, lambda_p), counts.size(), GraphMethod::support, omega);
}

DirectSupportGraph build_knowledge_graph(const ExerciseCorpus& corpus) {
  const std::size_t n = corpus.exercise_count();
  DirectSupportGraph g;
  g.n = n;
  g.method = GraphMethod::knowledge;
  g.adjacency.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && corpus.exercise(i).knowledge == corpus.exercise(j).knowledge) g.adjacency[i * n + j] = 1;
  return g;
}

DirectSupportGraph build_bertsim_graph(const EmbeddingTable& embeddings, double omega) {
  return threshold_scores(bertsim_scores(embeddings), embeddings.size(), GraphMethod::bertsim, omega);
}

DirectSupportGraph build_transition_graph(std::span<const LearnerSequence> sequences, std::size_t exercise_count,
                                          double omega) {
  return threshold_scores(transition_scores(sequences, exercise_count), exercise_count, GraphMethod::transition,
                          omega);
}

double edge_node_ratio(const DirectSupportGraph& graph) {
  if (graph.n == 0) return 0.0;
  return static_cast<double>(graph.edge_count()) / static_cast<double>(graph.n);
}

double select_omega(std::span<const double> scores, std::size_t n, double target_ratio) {
  if (scores.size() != n * n) throw DimensionError("score matrix is not n x n");
  if (n == 0) return 0.0;
  std::vector<double> values;
  values.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && scores[i * n + j] >= 0.0) values.push_back(scores[i * n + j]);
  std::sort(values.begin(), values.end());

  // Edges at omega = number of scores strictly greater than omega.
  auto edges_above = [&](double omega) {
    return static_cast<std::size_t>(values.end() - std::upper_bound(values.begin(), values.end(), omega));
  };
  std::vector<double> candidates{0.0};
  for (std::size_t k = 0; k < values.size(); ++k)
    if (k == 0 || values[k] != values[k - 1]) candidates.push_back(values[k]);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  double best = candidates.front();
  double best_gap = std::numeric_limits<double>::infinity();
  for (double omega : candidates) {
    double ratio = static_cast<double>(edges_above(omega)) / static_cast<double>(n);
    double gap = std::abs(ratio - target_ratio);
    if (gap < best_gap) {
      best_gap = gap;
      best = omega;
    }
  }
  return best;
}

}  // namespace hgkt
