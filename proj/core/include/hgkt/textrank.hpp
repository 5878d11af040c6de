#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hgkt {

/// The fixed 50-word English stop list used by keyphrase extraction.
std::span<const std::string_view> stop_words();
bool is_stop_word(std::string_view word);

/// Undirected weighted graph in dense form.
struct CooccurrenceGraph {
  std::size_t n = 0;
  std::vector<double> weights;  // n x n, symmetric, zero diagonal
};

struct TextRankOptions {
  double damping = 0.85;
  double tolerance = 1e-6;
  std::size_t max_iterations = 100;
};

struct TextRankResult {
  std::vector<double> scores;
  std::size_t iterations = 0;
  double last_change = 0.0;
};

/// Weighted TextRank recurrence S(i) = (1 - d) + d * sum_j w_ji / W_j * S(j),
/// iterated from all-ones until the L1 change drops below the tolerance.
TextRankResult textrank(const CooccurrenceGraph& graph, const TextRankOptions& options = {});

/// Candidate phrases of one text, in order. A candidate is a run of content
/// words, optionally joined across one "of" ("ratio of lengths"), capped at
/// three content words; a later "of ..." chain in the same run is treated as a
/// modifier and skipped.
std::vector<std::string> candidate_phrases(std::string_view text);

struct Keyphrase {
  std::string phrase;
  double score = 0.0;
};

/// Ranks candidate phrases over a co-occurrence graph (window of 3 candidates
/// within each text) and returns the top_k, ties broken by first appearance.
std::vector<Keyphrase> textrank_keyphrases(std::span<const std::string> texts, std::size_t top_k,
                                           const TextRankOptions& options = {});

}  // namespace hgkt
