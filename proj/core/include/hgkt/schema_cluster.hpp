#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hgkt/corpus.hpp"
#include "hgkt/embedding.hpp"

namespace hgkt {

struct Merge {
  std::size_t cluster_a = 0;  // smaller cluster id
  std::size_t cluster_b = 0;
  double distance = 0.0;
  std::size_t size = 0;       // members of the new cluster
};

/// Leaves are clusters 0..leaves-1; merge k creates cluster leaves+k.
struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;
};

/// Average linkage under Euclidean distance. Equal-distance candidates are
/// resolved by the lexicographically smallest (min id, max id) pair.
Dendrogram agglomerative_cluster(const EmbeddingTable& embeddings);

/// Hard exercise -> schema assignment (the one-hot S_e in compact form).
struct AssignmentMatrix {
  std::vector<std::size_t> assign;
  std::size_t schema_count = 0;
  double lambda = 0.0;

  std::size_t exercise_count() const { return assign.size(); }
  std::vector<std::size_t> members(std::size_t schema) const;
  /// Dense |E| x |S| 0/1 matrix, row-major.
  std::vector<double> dense() const;
  static AssignmentMatrix identity(std::size_t n);
  /// Renumbers schemas by smallest member index; throws on empty schemas.
  static AssignmentMatrix from_labels(std::span<const std::size_t> labels, double lambda = 0.0);
};

/// Applies merges with distance <= lambda; schema ids follow the smallest
/// member exercise index.
AssignmentMatrix cut_threshold(const Dendrogram& dendrogram, double lambda);

struct ClusterStats {
  std::size_t schema_count = 0;
  std::vector<std::size_t> sizes;                   // per schema, in schema order
  std::map<std::size_t, std::size_t> histogram;     // size -> number of schemas
};

ClusterStats cluster_stats(const AssignmentMatrix& assignment);

double adjusted_rand_index(std::span<const std::size_t> labels_a, std::span<const std::size_t> labels_b);

struct SchemaDescription {
  std::size_t schema_id = 0;
  std::vector<std::string> condition_keyphrases;
  std::vector<std::string> objective_keyphrases;
  std::string description;
};

/// Clause split + keyphrase template. Each text is split at its last comma
/// (or at "what"/"find" when no comma precedes the question) into a condition
/// part and an objective part; keyphrases of each side are ranked with
/// TextRank and rendered as "Given {conditions}, find the {objective}?".
SchemaDescription summarize_schema(std::size_t schema_id, std::span<const std::string> texts,
                                   std::size_t top_k = 2);

std::vector<SchemaDescription> summarize_schemas(const ExerciseCorpus& corpus, const AssignmentMatrix& assignment,
                                                 std::size_t top_k = 2);

}  // namespace hgkt
