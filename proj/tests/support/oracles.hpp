#pragma once

// Brute-force references used by unit and acceptance tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hgkt/corpus.hpp"

namespace hgkt::testing {

// counts[i][j][ri][rj], filled by checking every position pair of every sequence.
struct BruteCounts {
  std::size_t n = 0;
  std::vector<std::uint32_t> c;

  explicit BruteCounts(std::size_t n_) : n(n_), c(n_ * n_ * 4, 0) {}
  std::uint32_t& at(std::size_t i, std::size_t j, int ri, int rj) {
    return c[((i * n + j) * 2 + static_cast<std::size_t>(ri)) * 2 + static_cast<std::size_t>(rj)];
  }
  std::uint32_t get(std::size_t i, std::size_t j, int ri, int rj) const {
    return c[((i * n + j) * 2 + static_cast<std::size_t>(ri)) * 2 + static_cast<std::size_t>(rj)];
  }
};

inline bool first_occurrence(const LearnerSequence& s, std::size_t pos) {
  for (std::size_t q = 0; q < pos; ++q) {
    if (s.events[q].exercise == s.events[pos].exercise) return false;
  }
  return true;
}

inline BruteCounts brute_counts(std::span<const LearnerSequence> seqs, std::size_t n) {
  BruteCounts out(n);
  for (const auto& s : seqs) {
    for (std::size_t a = 0; a < s.events.size(); ++a) {
      if (!first_occurrence(s, a)) continue;
      for (std::size_t b = a + 1; b < s.events.size(); ++b) {
        if (!first_occurrence(s, b)) continue;
        const auto& ea = s.events[a];
        const auto& eb = s.events[b];
        if (ea.exercise == eb.exercise) continue;
        ++out.at(ea.exercise, eb.exercise, ea.correct, eb.correct);
      }
    }
  }
  return out;
}

// Sup(e_i -> e_j) straight from the smoothed ratio definition.
inline double brute_support(const BruteCounts& k, std::size_t i, std::size_t j, double lp) {
  if (i == j) return 0.0;
  // R-term: sequences where e_j was answered before e_i.
  const double rr = k.get(j, i, 1, 1);
  const double rw = k.get(j, i, 1, 0);
  const double any_ri = k.get(j, i, 0, 1) + k.get(j, i, 1, 1);
  const double all_ji = k.get(j, i, 0, 0) + k.get(j, i, 0, 1) + k.get(j, i, 1, 0) + k.get(j, i, 1, 1);
  const double p1 = (rr + lp) / (rr + rw + lp);
  const double p2 = (any_ri + lp) / (all_ji + lp);
  // W-term: sequences where e_i was answered before e_j.
  const double ww = k.get(i, j, 0, 0);
  const double wr = k.get(i, j, 0, 1);
  const double any_wj = k.get(i, j, 0, 0) + k.get(i, j, 1, 0);
  const double all_ij = k.get(i, j, 0, 0) + k.get(i, j, 0, 1) + k.get(i, j, 1, 0) + k.get(i, j, 1, 1);
  const double p3 = (ww + lp) / (ww + wr + lp);
  const double p4 = (any_wj + lp) / (all_ij + lp);
  return std::max(0.0, std::log(p1 / p2)) + std::max(0.0, std::log(p3 / p4));
}

// Random log: up to max_learners sequences of 1..max_events events over n exercises.
inline std::vector<LearnerSequence> random_toy_log(std::mt19937_64& rng, std::size_t n, std::size_t max_learners,
                                                   std::size_t max_events) {
  std::uniform_int_distribution<std::size_t> learners(1, max_learners);
  std::uniform_int_distribution<std::size_t> events(1, max_events);
  std::uniform_int_distribution<std::size_t> ex(0, n - 1);
  std::bernoulli_distribution coin(0.5);
  std::vector<LearnerSequence> out(learners(rng));
  for (std::size_t l = 0; l < out.size(); ++l) {
    out[l].learner = l;
    const std::size_t len = events(rng);
    for (std::size_t t = 0; t < len; ++t) {
      out[l].events.push_back({l, ex(rng), static_cast<std::uint8_t>(coin(rng)), static_cast<std::int64_t>(t)});
    }
  }
  return out;
}

// Mann-Whitney AUC over all positive/negative pairs, ties worth one half.
inline double brute_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t a = 0; a < scores.size(); ++a) {
    if (labels[a] != 1) continue;
    for (std::size_t b = 0; b < scores.size(); ++b) {
      if (labels[b] != 0) continue;
      pairs += 1.0;
      if (scores[a] > scores[b]) wins += 1.0;
      else if (scores[a] == scores[b]) wins += 0.5;
    }
  }
  return pairs == 0.0 ? 0.5 : wins / pairs;
}

// The three triangle exercises of the summarization example.
inline const std::array<std::string, 3>& triangle_texts() {
  static const std::array<std::string, 3> texts = {
      "If the ratio of lengths of three sides of a triangle is 2:3:4, and its circumference is 18, the shortest "
      "side length is?",
      "Given ratio of lengths of triangle sides is 2:4:4 and circumference is 20, what is the shortest side length?",
      "If we know that ratio of lengths of three sides of a triangle is 3:4:5, and circumference of the triangle is "
      "24, find the shortest side length?"};
  return texts;
}

// Fresh empty directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hgkt_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace hgkt::testing
