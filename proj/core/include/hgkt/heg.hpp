#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hgkt/corpus.hpp"
#include "hgkt/schema_cluster.hpp"
#include "hgkt/support_graph.hpp"

namespace hgkt {

/// Hierarchical exercise graph (A, F, S_e). F is the implicit identity.
/// Node i is exercise index i of the corpus the graph was built from.
struct Heg {
  DirectSupportGraph graph;
  AssignmentMatrix assignment;
  std::vector<std::size_t> knowledge;  // knowledge index per node
  std::vector<std::string> exercise_ids;
  std::vector<std::string> knowledge_ids;
  std::vector<std::string> schema_descriptions;
  double lambda_p = kDefaultLambdaP;

  std::size_t exercise_count() const { return graph.n; }
  std::size_t knowledge_count() const { return knowledge_ids.size(); }
  std::size_t schema_count() const { return assignment.schema_count; }

  /// Throws DimensionError when the parts disagree on sizes.
  void validate() const;
  /// Exercise and knowledge vocabulary of the graph, without text.
  ExerciseCorpus corpus() const;
  /// True when `corpus` has the same exercise ids and knowledge in node order.
  bool matches(const ExerciseCorpus& corpus) const;
};

Heg make_heg(const ExerciseCorpus& corpus, DirectSupportGraph graph, AssignmentMatrix assignment,
             double lambda_p = kDefaultLambdaP);

/// heg.json: method, omega, lambda_p, nodes, edges [[i, j, weight]...],
/// lambda, assignment, schema_count, schema_descriptions, knowledge,
/// knowledge_ids.
nlohmann::json heg_to_json(const Heg& heg);
Heg heg_from_json(const nlohmann::json& doc);
void save_heg(const std::filesystem::path& path, const Heg& heg);
Heg load_heg(const std::filesystem::path& path);

}  // namespace hgkt
