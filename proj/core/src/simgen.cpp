#include "hgkt/simgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <unordered_map>

#include "hgkt/errors.hpp"

namespace hgkt {

namespace {

constexpr std::array<const char*, 12> kShapes = {"triangle", "circle",  "rectangle", "square",  "trapezoid", "prism",
                                                 "cylinder", "cone",    "sphere",    "hexagon", "rhombus",   "pyramid"};
constexpr std::array<const char*, 12> kGivens = {"ratio of lengths", "perimeter",   "area",        "radius",
                                                 "diagonal",         "height",      "volume",      "angle sum",
                                                 "base length",      "arc length",  "side ratio",  "surface area"};
constexpr std::array<const char*, 12> kTargets = {"shortest side", "longest side",   "inscribed radius", "total area",
                                                  "missing angle", "slant height",   "chord length",     "median length",
                                                  "enclosed volume", "outer perimeter", "center distance", "tangent length"};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string schema_text(std::size_t schema, std::size_t variant) {
  const std::size_t n = kShapes.size();
  std::string suffix = schema >= n ? " variant " + std::to_string(schema / n) : "";
  return "Given the " + std::string(kGivens[schema % n]) + " " + std::to_string(variant + 2) + " of a " +
         kShapes[schema % n] + suffix + ", find the " + kTargets[schema % n] + "?";
}

template <typename T>
void read_key(const nlohmann::json& doc, const char* key, T& field) {
  if (doc.contains(key)) field = doc.at(key).get<T>();
}

}  // namespace

void SimConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("sim config: ") + what);
  };
  require(n_learners >= 1 && n_exercises >= 1 && n_knowledge >= 1 && n_true_schemas >= 1 && seq_len >= 1 &&
              embed_dim >= 2,
          "counts must be positive and embed_dim >= 2");
  require(n_true_schemas <= n_exercises, "n_true_schemas must not exceed n_exercises");
  require(knowledge_per_schema >= 1, "knowledge_per_schema must be positive");
  require(noise_sigma >= 0.0 && ability_sd >= 0.0 && schema_ability_sd >= 0.0 && difficulty_sd >= 0.0,
          "spreads must be non-negative");
  require(stay_prob >= 0.0 && stay_prob <= 1.0, "stay_prob must lie in [0, 1]");
  require(std::isfinite(learn_rate_gain), "learn_rate_gain must be finite");
}

SimConfig sim_config_from_json(const nlohmann::json& doc) {
  static const std::set<std::string> known = {
      "n_learners", "n_exercises", "n_knowledge", "n_true_schemas",    "seq_len",       "embed_dim",
      "learn_rate_gain", "noise_sigma", "seed",   "ability_sd",        "schema_ability_sd", "difficulty_sd",
      "stay_prob", "knowledge_per_schema"};
  if (!doc.is_object()) throw ValidationError("sim config must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) throw ValidationError("sim config: unknown key \"" + key + "\"");
  }
  SimConfig c;
  try {
    read_key(doc, "n_learners", c.n_learners);
    read_key(doc, "n_exercises", c.n_exercises);
    read_key(doc, "n_knowledge", c.n_knowledge);
    read_key(doc, "n_true_schemas", c.n_true_schemas);
    read_key(doc, "seq_len", c.seq_len);
    read_key(doc, "embed_dim", c.embed_dim);
    read_key(doc, "learn_rate_gain", c.learn_rate_gain);
    read_key(doc, "noise_sigma", c.noise_sigma);
    read_key(doc, "seed", c.seed);
    read_key(doc, "ability_sd", c.ability_sd);
    read_key(doc, "schema_ability_sd", c.schema_ability_sd);
    read_key(doc, "difficulty_sd", c.difficulty_sd);
    read_key(doc, "stay_prob", c.stay_prob);
    read_key(doc, "knowledge_per_schema", c.knowledge_per_schema);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("sim config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json sim_config_to_json(const SimConfig& c) {
  return {{"n_learners", c.n_learners},
          {"n_exercises", c.n_exercises},
          {"n_knowledge", c.n_knowledge},
          {"n_true_schemas", c.n_true_schemas},
          {"seq_len", c.seq_len},
          {"embed_dim", c.embed_dim},
          {"learn_rate_gain", c.learn_rate_gain},
          {"noise_sigma", c.noise_sigma},
          {"seed", c.seed},
          {"ability_sd", c.ability_sd},
          {"schema_ability_sd", c.schema_ability_sd},
          {"difficulty_sd", c.difficulty_sd},
          {"stay_prob", c.stay_prob},
          {"knowledge_per_schema", c.knowledge_per_schema}};
}

SimConfig load_sim_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return sim_config_from_json(doc);
}

nlohmann::json ground_truth_to_json(const GroundTruth& t) {
  return {{"exercise_ids", t.exercise_ids}, {"learner_ids", t.learner_ids}, {"schema_of", t.schema_of},
          {"knowledge_of", t.knowledge_of}, {"difficulty", t.difficulty},   {"ability", t.ability},
          {"gain", t.gain},                 {"centroids", t.centroids}};
}

GroundTruth ground_truth_from_json(const nlohmann::json& doc) {
  try {
    GroundTruth t;
    t.exercise_ids = doc.at("exercise_ids").get<std::vector<std::string>>();
    t.learner_ids = doc.at("learner_ids").get<std::vector<std::string>>();
    t.schema_of = doc.at("schema_of").get<std::vector<std::size_t>>();
    t.knowledge_of = doc.at("knowledge_of").get<std::vector<std::size_t>>();
    t.difficulty = doc.at("difficulty").get<std::vector<double>>();
    t.ability = doc.at("ability").get<std::vector<std::vector<double>>>();
    t.gain = doc.at("gain").get<double>();
    t.centroids = doc.at("centroids").get<std::vector<std::vector<double>>>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("ground truth: ") + e.what());
  }
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return ground_truth_from_json(doc);
}

SimulatedData generate(const SimConfig& config) {
  config.validate();
  const std::size_t E = config.n_exercises, K = config.n_knowledge, S = config.n_true_schemas, D = config.embed_dim;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto uniform_index = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto unit = [&] { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); };

  SimulatedData data;
  GroundTruth& truth = data.truth;
  truth.gain = config.learn_rate_gain;

  truth.centroids.assign(S, std::vector<double>(D));
  for (auto& c : truth.centroids)
    for (auto& v : c) v = normal(rng);

  // many-to-many knowledge <-> schema: round robin first, then random extras
  const std::size_t per_schema = std::min(config.knowledge_per_schema, K);
  std::vector<std::vector<std::size_t>> schema_knowledge(S);
  for (std::size_t s = 0; s < S; ++s) {
    schema_knowledge[s].push_back(s % K);
    while (schema_knowledge[s].size() < per_schema) {
      std::size_t k = uniform_index(K);
      if (std::find(schema_knowledge[s].begin(), schema_knowledge[s].end(), k) == schema_knowledge[s].end()) {
        schema_knowledge[s].push_back(k);
      }
    }
  }

  truth.schema_of.resize(E);
  for (std::size_t e = 0; e < E; ++e) truth.schema_of[e] = e < S ? e : uniform_index(S);
  std::shuffle(truth.schema_of.begin(), truth.schema_of.end(), rng);
  truth.knowledge_of.resize(E);
  for (std::size_t e = 0; e < E; ++e) {
    const auto& ks = schema_knowledge[truth.schema_of[e]];
    truth.knowledge_of[e] = ks[uniform_index(ks.size())];
  }

  data.embeddings.dim = D;
  data.embeddings.rows.resize(E * D);
  const double coord_sd = config.noise_sigma / std::sqrt(static_cast<double>(D));
  std::vector<std::size_t> variant(S, 0);
  for (std::size_t e = 0; e < E; ++e) {
    const std::string id = "e" + std::to_string(e);
    truth.exercise_ids.push_back(id);
    const std::size_t s = truth.schema_of[e];
    data.corpus.add(id, "k" + std::to_string(truth.knowledge_of[e]), schema_text(s, variant[s]++));
    data.embeddings.row_ids.push_back(id);
    for (std::size_t d = 0; d < D; ++d) {
      data.embeddings.rows[e * D + d] = static_cast<float>(truth.centroids[s][d] + coord_sd * normal(rng));
    }
  }
  // corpus interns knowledge by first appearance; record truth in corpus indices
  for (std::size_t e = 0; e < E; ++e) truth.knowledge_of[e] = data.corpus.exercise(e).knowledge;

  truth.difficulty.resize(S);
  for (auto& d : truth.difficulty) d = config.difficulty_sd * normal(rng);

  std::vector<std::vector<std::size_t>> members(S);
  for (std::size_t e = 0; e < E; ++e) members[truth.schema_of[e]].push_back(e);

  truth.ability.assign(config.n_learners, std::vector<double>(S));
  for (std::size_t l = 0; l < config.n_learners; ++l) {
    const double theta = config.ability_sd * normal(rng);
    for (auto& a : truth.ability[l]) a = theta + config.schema_ability_sd * normal(rng);
  }

  for (std::size_t l = 0; l < config.n_learners; ++l) {
    const std::string id = "l" + std::to_string(l);
    truth.learner_ids.push_back(id);
    LearnerSequence seq;
    seq.learner = data.log.learner_ids.intern(id);
    std::vector<double> ability = truth.ability[l];
    std::size_t schema = 0;
    for (std::size_t t = 0; t < config.seq_len; ++t) {
      if (t == 0 || unit() >= config.stay_prob) schema = uniform_index(S);
      const std::size_t e = members[schema][uniform_index(members[schema].size())];
      const double p = sigmoid(ability[schema] - truth.difficulty[schema]);
      const std::uint8_t correct = unit() < p ? 1 : 0;
      seq.events.push_back({seq.learner, e, correct, static_cast<std::int64_t>(t)});
      ability[schema] += config.learn_rate_gain;
    }
    data.log.event_count += seq.events.size();
    data.log.sequences.push_back(std::move(seq));
  }
  return data;
}

void write_simulation(const std::filesystem::path& dir, const SimulatedData& data) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "exercises.jsonl");
    for (const auto& e : data.corpus.exercises()) {
      nlohmann::json row = {{"exercise_id", data.corpus.exercise_ids().name(e.index)},
                            {"knowledge_id", data.corpus.knowledge_ids().name(e.knowledge)}};
      if (e.text) row["text"] = *e.text;
      out << row.dump() << '\n';
    }
  }
  save_logs(dir / "logs.jsonl", data.log.sequences, data.log.learner_ids, data.corpus);
  write_embeddings(dir / "embeddings.bin", data.embeddings);
  std::ofstream(dir / "ground_truth.json") << ground_truth_to_json(data.truth).dump(1) << '\n';
}

Evaluation bayes_ceiling(const GroundTruth& truth, std::span<const LearnerSequence> sequences,
                         const Interner& learner_ids, const Interner& exercise_ids, std::size_t min_length) {
  std::unordered_map<std::string, std::size_t> learner_index, exercise_index;
  for (std::size_t i = 0; i < truth.learner_ids.size(); ++i) learner_index[truth.learner_ids[i]] = i;
  for (std::size_t i = 0; i < truth.exercise_ids.size(); ++i) exercise_index[truth.exercise_ids[i]] = i;
  Evaluation ev;
  for (const auto& seq : sequences) {
    if (seq.events.size() < min_length) continue;
    auto lit = learner_index.find(learner_ids.name(seq.learner));
    if (lit == learner_index.end()) throw ValidationError("ground truth has no learner " + learner_ids.name(seq.learner));
    std::vector<double> ability = truth.ability.at(lit->second);
    for (std::size_t t = 0; t < seq.events.size(); ++t) {
      const auto& e = seq.events[t];
      auto eit = exercise_index.find(exercise_ids.name(e.exercise));
      if (eit == exercise_index.end()) throw ValidationError("ground truth has no exercise " + exercise_ids.name(e.exercise));
      const std::size_t s = truth.schema_of.at(eit->second);
      if (t > 0) {
        ev.scores.push_back(sigmoid(ability[s] - truth.difficulty[s]));
        ev.labels.push_back(e.correct);
      }
      ability[s] += truth.gain;
    }
  }
  ev.metrics = compute_metrics(ev.scores, ev.labels);
  return ev;
}

}  // namespace hgkt
