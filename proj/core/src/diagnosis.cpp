#include "hgkt/diagnosis.hpp"

#include <fstream>
#include <random>

#include "hgkt/errors.hpp"

namespace hgkt {

std::size_t QCounts::total() const {
  std::size_t s = 0;
  for (auto v : q) s += v;
  return s;
}

QCounts q_counts(std::span<const std::size_t> knowledge_of, std::size_t knowledge_count,
                 const AssignmentMatrix& assignment) {
  if (knowledge_of.size() != assignment.exercise_count()) {
    throw DimensionError("q_counts: " + std::to_string(knowledge_of.size()) + " exercises vs assignment of " +
                         std::to_string(assignment.exercise_count()));
  }
  QCounts q{knowledge_count, assignment.schema_count, std::vector<std::size_t>(knowledge_count * assignment.schema_count)};
  for (std::size_t e = 0; e < knowledge_of.size(); ++e) {
    if (knowledge_of[e] >= knowledge_count || assignment.assign[e] >= q.schemas) {
      throw DimensionError("q_counts: index out of range");
    }
    ++q.q[knowledge_of[e] * q.schemas + assignment.assign[e]];
  }
  return q;
}

QCounts q_counts(const ExerciseCorpus& corpus, const AssignmentMatrix& assignment) {
  std::vector<std::size_t> k;
  for (const auto& e : corpus.exercises()) k.push_back(e.knowledge);
  return q_counts(k, corpus.knowledge_count(), assignment);
}

QCounts q_counts(const Heg& heg) { return q_counts(heg.knowledge, heg.knowledge_count(), heg.assignment); }

KsMatrix ks_matrix(const nn::HgktModel<float>& model, std::span<const InteractionEvent> history) {
  if (history.empty()) throw ValidationError("diagnosis needs at least one event of history");
  const std::size_t K = model.knowledge_count(), S = model.schema_count();
  std::mt19937_64 rng(0);
  auto emb = model.encode_schemas();
  auto cursor = model.start(1);
  for (const auto& ev : history) {
    std::size_t ex = ev.exercise;
    std::uint8_t r = ev.correct;
    model.observe(cursor, std::span<const std::size_t>(&ex, 1), std::span<const std::uint8_t>(&r, 1), emb, false, rng);
  }
  auto wide = model.broadcast(cursor, K * S);
  std::vector<std::size_t> knowledge(K * S), schema(K * S);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = 0; j < S; ++j) {
      knowledge[i * S + j] = i;
      schema[i * S + j] = j;
    }
  auto s_next = nn::gather_rows(emb.memory_rows, std::span<const std::size_t>(schema));
  auto pred = model.predict_with(wide, knowledge, s_next, emb, false, rng);
  KsMatrix m{K, S, std::vector<double>(pred.values().begin(), pred.values().end()), history.size(), ""};
  return m;
}

std::vector<KsMatrix> mastery_trajectory(const nn::HgktModel<float>& model, std::span<const InteractionEvent> history) {
  std::vector<KsMatrix> out;
  for (std::size_t t = 1; t <= history.size(); ++t) out.push_back(ks_matrix(model, history.first(t)));
  return out;
}

namespace {

// Nudges the largest weight until the left-to-right sum is exactly 1.
// Makes the in-order sum of the strided slice exactly 1: the last nonzero entry
// becomes 1 minus the running sum before it. Near 1 the subtraction and the
// final addition are both exact or round back to 1.
void settle(std::vector<double>& d, std::size_t first, std::size_t stride, std::size_t count) {
  std::size_t last = count;
  for (std::size_t k = 0; k < count; ++k)
    if (d[first + k * stride] != 0.0) last = k;
  if (last == count) return;
  double before = 0.0;
  for (std::size_t k = 0; k < last; ++k) before += d[first + k * stride];
  d[first + last * stride] = 1.0 - before;
}

}  // namespace

std::vector<double> knowledge_weights(const QCounts& q) {
  std::vector<double> d(q.q.size(), 0.0);
  for (std::size_t i = 0; i < q.knowledge; ++i) {
    std::size_t row = 0;
    for (std::size_t j = 0; j < q.schemas; ++j) row += q.at(i, j);
    if (row == 0) continue;
    for (std::size_t j = 0; j < q.schemas; ++j) d[i * q.schemas + j] = static_cast<double>(q.at(i, j)) / row;
    settle(d, i * q.schemas, 1, q.schemas);
  }
  return d;
}

std::vector<double> schema_weights(const QCounts& q) {
  std::vector<double> d(q.q.size(), 0.0);
  for (std::size_t j = 0; j < q.schemas; ++j) {
    std::size_t col = 0;
    for (std::size_t i = 0; i < q.knowledge; ++i) col += q.at(i, j);
    if (col == 0) continue;
    for (std::size_t i = 0; i < q.knowledge; ++i) d[i * q.schemas + j] = static_cast<double>(q.at(i, j)) / col;
    settle(d, j, q.schemas, q.knowledge);
  }
  return d;
}

namespace {
void check_dims(const KsMatrix& r, const QCounts& q) {
  if (r.knowledge != q.knowledge || r.schemas != q.schemas || r.values.size() != q.q.size()) {
    throw DimensionError("diagnosis: K&S matrix and q counts differ in shape");
  }
}
}  // namespace

std::vector<std::optional<double>> knowledge_mastery(const KsMatrix& r_ks, const QCounts& q) {
  check_dims(r_ks, q);
  auto d = knowledge_weights(q);
  std::vector<std::optional<double>> out(q.knowledge);
  for (std::size_t i = 0; i < q.knowledge; ++i) {
    bool covered = false;
    double v = 0;
    for (std::size_t j = 0; j < q.schemas; ++j) {
      covered |= q.at(i, j) > 0;
      v += r_ks.at(i, j) * d[i * q.schemas + j];
    }
    if (covered) out[i] = v;
  }
  return out;
}

std::vector<std::optional<double>> schema_mastery(const KsMatrix& r_ks, const QCounts& q) {
  check_dims(r_ks, q);
  auto d = schema_weights(q);
  std::vector<std::optional<double>> out(q.schemas);
  for (std::size_t j = 0; j < q.schemas; ++j) {
    bool covered = false;
    double v = 0;
    for (std::size_t i = 0; i < q.knowledge; ++i) {
      covered |= q.at(i, j) > 0;
      v += r_ks.at(i, j) * d[i * q.schemas + j];
    }
    if (covered) out[j] = v;
  }
  return out;
}

nlohmann::json diagnosis_json(const KsMatrix& r_ks, const QCounts& q, std::span<const std::string> knowledge_ids,
                              std::span<const std::string> schema_ids) {
  if (knowledge_ids.size() != r_ks.knowledge || schema_ids.size() != r_ks.schemas) {
    throw DimensionError("diagnosis: id lists do not match the matrix shape");
  }
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < r_ks.knowledge; ++i) {
    rows.push_back(std::vector<double>(r_ks.values.begin() + i * r_ks.schemas,
                                       r_ks.values.begin() + (i + 1) * r_ks.schemas));
  }
  nlohmann::json rk = nlohmann::json::object(), rs = nlohmann::json::object();
  auto k = knowledge_mastery(r_ks, q);
  auto s = schema_mastery(r_ks, q);
  for (std::size_t i = 0; i < k.size(); ++i)
    if (k[i]) rk[knowledge_ids[i]] = *k[i];
  for (std::size_t j = 0; j < s.size(); ++j)
    if (s[j]) rs[schema_ids[j]] = *s[j];
  return {{"learner_id", r_ks.learner_id},
          {"t", r_ks.t},
          {"knowledge_ids", std::vector<std::string>(knowledge_ids.begin(), knowledge_ids.end())},
          {"schema_ids", std::vector<std::string>(schema_ids.begin(), schema_ids.end())},
          {"R_ks", rows},
          {"R_k", rk},
          {"R_s", rs}};
}

void write_ks_csv(const std::filesystem::path& path, const KsMatrix& r_ks, std::span<const std::string> knowledge_ids,
                  std::span<const std::string> schema_ids) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "knowledge_id";
  for (const auto& s : schema_ids) out << ',' << s;
  out << '\n';
  out.precision(9);
  for (std::size_t i = 0; i < r_ks.knowledge; ++i) {
    out << knowledge_ids[i];
    for (std::size_t j = 0; j < r_ks.schemas; ++j) out << ',' << r_ks.at(i, j);
    out << '\n';
  }
}

}  // namespace hgkt
