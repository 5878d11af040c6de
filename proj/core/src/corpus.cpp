#include "hgkt/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hgkt/errors.hpp"

namespace hgkt {

using nlohmann::json;

std::size_t Interner::intern(std::string_view id) {
  auto it = index_.find(std::string(id));
  if (it != index_.end()) return it->second;
  std::size_t index = names_.size();
  names_.emplace_back(id);
  index_.emplace(names_.back(), index);
  return index;
}

std::optional<std::size_t> Interner::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Interner::name(std::size_t index) const {
  if (index >= names_.size()) {
    throw ValidationError("interned index " + std::to_string(index) + " out of range");
  }
  return names_[index];
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

json parse_line(const std::string& line, std::size_t line_no) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw ValidationError("line " + std::to_string(line_no) + ": expected a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ValidationError("line " + std::to_string(line_no) + ": malformed JSON (" + e.what() + ")");
  }
}

std::string require_string(const json& j, const char* key, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw ValidationError("line " + std::to_string(line_no) + ": missing string field \"" + key + "\"");
  }
  return it->get<std::string>();
}

}  // namespace

std::size_t ExerciseCorpus::add(std::string_view exercise_id, std::string_view knowledge_id,
                                std::optional<std::string> text) {
  if (exercise_ids_.find(exercise_id)) {
    throw ValidationError("duplicate exercise_id \"" + std::string(exercise_id) + "\"");
  }
  Exercise ex;
  ex.index = exercise_ids_.intern(exercise_id);
  ex.knowledge = knowledge_ids_.intern(knowledge_id);
  ex.text = std::move(text);
  exercises_.push_back(std::move(ex));
  return exercises_.back().index;
}

bool ExerciseCorpus::has_all_text() const {
  return std::all_of(exercises_.begin(), exercises_.end(),
                     [](const Exercise& e) { return e.text.has_value(); });
}

ExerciseCorpus ExerciseCorpus::load(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse(in);
}

ExerciseCorpus ExerciseCorpus::parse(std::istream& in) {
  ExerciseCorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json j = parse_line(line, line_no);
    std::string id = require_string(j, "exercise_id", line_no);
    std::string knowledge = require_string(j, "knowledge_id", line_no);
    std::optional<std::string> text;
    if (auto it = j.find("text"); it != j.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw ValidationError("line " + std::to_string(line_no) + ": \"text\" must be a string");
      }
      text = it->get<std::string>();
    }
    try {
      corpus.add(id, knowledge, std::move(text));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (corpus.exercise_count() == 0) throw ValidationError("no exercises");
  return corpus;
}

InteractionLog load_logs(const std::filesystem::path& path, const ExerciseCorpus& corpus) {
  auto in = open_input(path);
  return parse_logs(in, corpus);
}

void write_logs(std::ostream& out, std::span<const LearnerSequence> sequences, const Interner& learner_ids,
                const ExerciseCorpus& corpus) {
  for (const auto& seq : sequences)
    for (const auto& ev : seq.events) {
      nlohmann::json row = {{"learner_id", learner_ids.name(ev.learner)},
                            {"exercise_id", corpus.exercise_ids().name(ev.exercise)},
                            {"correct", static_cast<int>(ev.correct)},
                            {"t", ev.order_key}};
      out << row.dump() << '\n';
    }
}

void save_logs(const std::filesystem::path& path, std::span<const LearnerSequence> sequences,
               const Interner& learner_ids, const ExerciseCorpus& corpus) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_logs(out, sequences, learner_ids, corpus);
}

InteractionLog parse_logs(std::istream& in, const ExerciseCorpus& corpus) {
  InteractionLog log;
  std::vector<std::vector<InteractionEvent>> grouped;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json j = parse_line(line, line_no);
    std::string learner = require_string(j, "learner_id", line_no);
    std::string exercise = require_string(j, "exercise_id", line_no);
    auto ex = corpus.exercise_ids().find(exercise);
    if (!ex) {
      throw ValidationError("line " + std::to_string(line_no) + ": unknown exercise_id \"" + exercise + "\"");
    }
    auto correct = j.find("correct");
    if (correct == j.end() || !correct->is_number_integer() ||
        (correct->get<std::int64_t>() != 0 && correct->get<std::int64_t>() != 1)) {
      throw ValidationError("line " + std::to_string(line_no) + ": \"correct\" must be 0 or 1");
    }
    auto t = j.find("t");
    if (t == j.end() || !t->is_number_integer()) {
      throw ValidationError("line " + std::to_string(line_no) + ": missing integer field \"t\"");
    }
    InteractionEvent ev;
    ev.learner = log.learner_ids.intern(learner);
    ev.exercise = *ex;
    ev.correct = static_cast<std::uint8_t>(correct->get<std::int64_t>());
    ev.order_key = t->get<std::int64_t>();
    if (ev.learner == grouped.size()) grouped.emplace_back();
    grouped[ev.learner].push_back(ev);
    ++log.event_count;
  }
  log.sequences.reserve(grouped.size());
  for (std::size_t l = 0; l < grouped.size(); ++l) {
    auto& events = grouped[l];
    std::stable_sort(events.begin(), events.end(),
                     [](const InteractionEvent& a, const InteractionEvent& b) {
                       return a.order_key < b.order_key;
                     });
    log.sequences.push_back({l, std::move(events)});
  }
  return log;
}

std::pair<std::vector<LearnerSequence>, std::vector<LearnerSequence>> split_sequences(
    std::span<const LearnerSequence> sequences, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("split ratio must lie in (0, 1)");
  const std::size_t n = sequences.size();
  if (n < 2) throw ValidationError("split needs at least 2 learners");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  // Keep the original relative order on each side so downstream shuffles
  // depend only on their own seed.
  std::vector<bool> in_train(n, false);
  for (std::size_t k = 0; k < n_train; ++k) in_train[order[k]] = true;
  std::vector<LearnerSequence> train, test;
  for (std::size_t i = 0; i < n; ++i) (in_train[i] ? train : test).push_back(sequences[i]);
  return {std::move(train), std::move(test)};
}

std::vector<LearnerSequence> prepare_sequences(std::span<const LearnerSequence> sequences,
                                               SequenceLimits limits) {
  std::vector<LearnerSequence> out;
  const std::size_t window = std::max<std::size_t>(limits.max_length, 1);
  for (const auto& seq : sequences) {
    for (std::size_t start = 0; start < seq.events.size(); start += window) {
      std::size_t end = std::min(seq.events.size(), start + window);
      if (end - start < limits.min_length) continue;
      LearnerSequence chunk;
      chunk.learner = seq.learner;
      chunk.events.assign(seq.events.begin() + static_cast<std::ptrdiff_t>(start),
                          seq.events.begin() + static_cast<std::ptrdiff_t>(end));
      out.push_back(std::move(chunk));
    }
  }
  return out;
}

}  // namespace hgkt
