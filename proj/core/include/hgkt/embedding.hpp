#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hgkt/corpus.hpp"

namespace hgkt {

/// Row-major N x dim table of exercise vectors.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::vector<float> rows;
  std::vector<std::string> row_ids;

  std::size_t size() const { return row_ids.size(); }
  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(rows).subspan(i * dim, dim);
  }
  /// Throws ValidationError on NaN/Inf or inconsistent sizes.
  void validate() const;
};

/// Binary layout: "HGKTEMB1", u32 N, u32 D, N*D little-endian f32, then a
/// UTF-8 JSON array of N exercise ids starting at byte 16 + 4*N*D.
EmbeddingTable read_embeddings(const std::filesystem::path& path);
void write_embeddings(const std::filesystem::path& path, const EmbeddingTable& table);

/// Reorders `table` so row i belongs to exercise index i; every exercise
/// must appear exactly once.
EmbeddingTable align_embeddings(const EmbeddingTable& table, const ExerciseCorpus& corpus);

/// Deterministic text embedder: hashed bag of lowercase tokens, each token
/// mapped to a seeded pseudo-random direction, summed and L2-normalised.
EmbeddingTable fallback_embed(const ExerciseCorpus& corpus, std::size_t dim, std::uint64_t seed);

/// Cosine similarity; 0 when either vector is all zeros.
double cosine_similarity(std::span<const float> a, std::span<const float> b);

std::vector<std::string> tokenize_lower(std::string_view text);

}  // namespace hgkt
