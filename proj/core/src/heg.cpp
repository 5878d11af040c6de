#include "hgkt/heg.hpp"

#include <fstream>

#include "hgkt/errors.hpp"

namespace hgkt {

void Heg::validate() const {
  const std::size_t n = graph.n;
  if (graph.adjacency.size() != n * n) throw DimensionError("heg: adjacency is not n x n");
  if (assignment.exercise_count() != n) {
    throw DimensionError("heg: assignment covers " + std::to_string(assignment.exercise_count()) + " nodes, graph has " +
                         std::to_string(n));
  }
  if (knowledge.size() != n || exercise_ids.size() != n) throw DimensionError("heg: node metadata size mismatch");
  for (std::size_t k : knowledge) {
    if (k >= knowledge_ids.size()) throw DimensionError("heg: knowledge index out of range");
  }
  std::vector<bool> used(assignment.schema_count, false);
  for (std::size_t s : assignment.assign) {
    if (s >= assignment.schema_count) throw DimensionError("heg: schema index out of range");
    used[s] = true;
  }
  for (bool u : used) {
    if (!u) throw DimensionError("heg: empty schema in assignment");
  }
}

ExerciseCorpus Heg::corpus() const {
  ExerciseCorpus c;
  for (std::size_t i = 0; i < exercise_ids.size(); ++i) c.add(exercise_ids[i], knowledge_ids.at(knowledge[i]));
  return c;
}

bool Heg::matches(const ExerciseCorpus& corpus) const {
  if (corpus.exercise_count() != exercise_ids.size()) return false;
  for (std::size_t i = 0; i < exercise_ids.size(); ++i) {
    if (corpus.exercise_ids().name(i) != exercise_ids[i]) return false;
    if (corpus.knowledge_ids().name(corpus.exercise(i).knowledge) != knowledge_ids[knowledge[i]]) return false;
  }
  return true;
}

Heg make_heg(const ExerciseCorpus& corpus, DirectSupportGraph graph, AssignmentMatrix assignment, double lambda_p) {
  Heg heg;
  heg.graph = std::move(graph);
  heg.assignment = std::move(assignment);
  heg.exercise_ids = corpus.exercise_ids().names();
  heg.knowledge_ids = corpus.knowledge_ids().names();
  for (const auto& e : corpus.exercises()) heg.knowledge.push_back(e.knowledge);
  heg.lambda_p = lambda_p;
  heg.validate();
  return heg;
}

nlohmann::json heg_to_json(const Heg& heg) {
  nlohmann::json edges = nlohmann::json::array();
  const std::size_t n = heg.graph.n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!heg.graph.edge(i, j)) continue;
      double w = heg.graph.weights ? (*heg.graph.weights)[i * n + j] : 1.0;
      edges.push_back({i, j, w});
    }
  return {
      {"method", std::string(to_string(heg.graph.method))},
      {"omega", heg.graph.omega},
      {"lambda_p", heg.lambda_p},
      {"nodes", heg.exercise_ids},
      {"edges", edges},
      {"lambda", heg.assignment.lambda},
      {"assignment", heg.assignment.assign},
      {"schema_count", heg.assignment.schema_count},
      {"schema_descriptions", heg.schema_descriptions},
      {"knowledge", heg.knowledge},
      {"knowledge_ids", heg.knowledge_ids},
  };
}

Heg heg_from_json(const nlohmann::json& doc) {
  try {
    Heg heg;
    heg.exercise_ids = doc.at("nodes").get<std::vector<std::string>>();
    const std::size_t n = heg.exercise_ids.size();
    heg.graph.n = n;
    heg.graph.method = parse_graph_method(doc.at("method").get<std::string>());
    heg.graph.omega = doc.at("omega").get<double>();
    heg.graph.adjacency.assign(n * n, 0);
    std::vector<double> weights(n * n, 0.0);
    for (const auto& e : doc.at("edges")) {
      auto i = e.at(0).get<std::size_t>(), j = e.at(1).get<std::size_t>();
      if (i >= n || j >= n) throw DimensionError("heg: edge endpoint out of range");
      heg.graph.adjacency[i * n + j] = 1;
      weights[i * n + j] = e.at(2).get<double>();
    }
    heg.graph.weights = std::move(weights);
    heg.lambda_p = doc.value("lambda_p", kDefaultLambdaP);
    heg.assignment.assign = doc.at("assignment").get<std::vector<std::size_t>>();
    heg.assignment.schema_count = doc.at("schema_count").get<std::size_t>();
    heg.assignment.lambda = doc.value("lambda", 0.0);
    heg.schema_descriptions = doc.value("schema_descriptions", std::vector<std::string>{});
    heg.knowledge = doc.at("knowledge").get<std::vector<std::size_t>>();
    heg.knowledge_ids = doc.at("knowledge_ids").get<std::vector<std::string>>();
    heg.validate();
    return heg;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("heg.json: ") + e.what());
  }
}

void save_heg(const std::filesystem::path& path, const Heg& heg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << heg_to_json(heg).dump(1) << '\n';
}

Heg load_heg(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return heg_from_json(doc);
}

}  // namespace hgkt
