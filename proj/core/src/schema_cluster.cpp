#include "hgkt/schema_cluster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "hgkt/errors.hpp"
#include "hgkt/textrank.hpp"

namespace hgkt {

namespace {

struct PairKey {
  double distance;
  std::size_t lo;
  std::size_t hi;
  bool operator<(const PairKey& o) const { return std::tie(distance, lo, hi) < std::tie(o.distance, o.lo, o.hi); }
};

}  // namespace

Dendrogram agglomerative_cluster(const EmbeddingTable& embeddings) {
  const std::size_t n = embeddings.size();
  const std::size_t d = embeddings.dim;
  for (float v : embeddings.rows) {
    if (std::isnan(v)) throw ValidationError("NaN in embeddings; cannot cluster");
  }
  Dendrogram dendro;
  dendro.leaves = n;
  if (n < 2) return dendro;

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto a = embeddings.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      auto b = embeddings.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        double diff = static_cast<double>(a[k]) - b[k];
        s += diff * diff;
      }
      dist[i * n + j] = dist[j * n + i] = std::sqrt(s);
    }
  }

  // Slot i holds one active cluster; a merge keeps the smaller slot.
  std::vector<std::size_t> id(n), size(n, 1);
  std::iota(id.begin(), id.end(), 0);
  std::vector<bool> active(n, true);
  std::vector<std::size_t> nn(n, 0);
  std::vector<PairKey> nn_key(n);

  auto key = [&](std::size_t i, std::size_t j) {
    return PairKey{dist[i * n + j], std::min(id[i], id[j]), std::max(id[i], id[j])};
  };
  auto refresh = [&](std::size_t i) {
    nn_key[i] = PairKey{std::numeric_limits<double>::infinity(), 0, 0};
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !active[j]) continue;
      PairKey k = key(i, j);
      if (k < nn_key[i]) {
        nn_key[i] = k;
        nn[i] = j;
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (active[i] && (best == n || nn_key[i] < nn_key[best])) best = i;
    }
    std::size_t a = std::min(best, nn[best]);
    std::size_t b = std::max(best, nn[best]);
    dendro.merges.push_back({std::min(id[a], id[b]), std::max(id[a], id[b]), nn_key[best].distance, size[a] + size[b]});

    // Lance-Williams update for average linkage.
    const double wa = static_cast<double>(size[a]), wb = static_cast<double>(size[b]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      double v = (wa * dist[a * n + k] + wb * dist[b * n + k]) / (wa + wb);
      dist[a * n + k] = dist[k * n + a] = v;
    }
    active[b] = false;
    size[a] += size[b];
    id[a] = n + step;

    refresh(a);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a) continue;
      if (nn[k] == a || nn[k] == b) {
        refresh(k);
      } else {
        PairKey cand = key(k, a);
        if (cand < nn_key[k]) {
          nn_key[k] = cand;
          nn[k] = a;
        }
      }
    }
  }
  return dendro;
}

std::vector<std::size_t> AssignmentMatrix::members(std::size_t schema) const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < assign.size(); ++e)
    if (assign[e] == schema) out.push_back(e);
  return out;
}

std::vector<double> AssignmentMatrix::dense() const {
  std::vector<double> m(assign.size() * schema_count, 0.0);
  for (std::size_t e = 0; e < assign.size(); ++e) m[e * schema_count + assign[e]] = 1.0;
  return m;
}

AssignmentMatrix AssignmentMatrix::identity(std::size_t n) {
  AssignmentMatrix a;
  a.assign.resize(n);
  std::iota(a.assign.begin(), a.assign.end(), 0);
  a.schema_count = n;
  return a;
}

AssignmentMatrix AssignmentMatrix::from_labels(std::span<const std::size_t> labels, double lambda) {
  AssignmentMatrix a;
  a.lambda = lambda;
  a.assign.resize(labels.size());
  std::vector<std::pair<std::size_t, std::size_t>> seen;  // label -> schema
  for (std::size_t e = 0; e < labels.size(); ++e) {
    auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& p) { return p.first == labels[e]; });
    if (it == seen.end()) {
      seen.emplace_back(labels[e], seen.size());
      a.assign[e] = seen.back().second;
    } else {
      a.assign[e] = it->second;
    }
  }
  a.schema_count = seen.size();
  return a;
}

AssignmentMatrix cut_threshold(const Dendrogram& dendrogram, double lambda) {
  const std::size_t n = dendrogram.leaves;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  // Cluster id -> one representative leaf.
  std::vector<std::size_t> rep(n + dendrogram.merges.size());
  std::iota(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(n), 0);
  for (std::size_t k = 0; k < dendrogram.merges.size(); ++k) {
    const Merge& m = dendrogram.merges[k];
    if (m.distance > lambda) break;
    std::size_t ra = find(rep[m.cluster_a]), rb = find(rep[m.cluster_b]);
    parent[std::max(ra, rb)] = std::min(ra, rb);
    rep[n + k] = std::min(ra, rb);
  }
  std::vector<std::size_t> labels(n);
  for (std::size_t e = 0; e < n; ++e) labels[e] = find(e);
  return AssignmentMatrix::from_labels(labels, lambda);
}

ClusterStats cluster_stats(const AssignmentMatrix& assignment) {
  ClusterStats s;
  s.schema_count = assignment.schema_count;
  s.sizes.assign(assignment.schema_count, 0);
  for (std::size_t a : assignment.assign) ++s.sizes.at(a);
  for (std::size_t sz : s.sizes) ++s.histogram[sz];
  return s;
}

double adjusted_rand_index(std::span<const std::size_t> labels_a, std::span<const std::size_t> labels_b) {
  if (labels_a.size() != labels_b.size()) throw DimensionError("ARI label vectors differ in length");
  const std::size_t n = labels_a.size();
  if (n < 2) return 1.0;
  auto ra = AssignmentMatrix::from_labels(labels_a);
  auto rb = AssignmentMatrix::from_labels(labels_b);
  std::vector<double> table(ra.schema_count * rb.schema_count, 0.0);
  std::vector<double> rows(ra.schema_count, 0.0), cols(rb.schema_count, 0.0);
  for (std::size_t e = 0; e < n; ++e) {
    table[ra.assign[e] * rb.schema_count + rb.assign[e]] += 1.0;
    rows[ra.assign[e]] += 1.0;
    cols[rb.assign[e]] += 1.0;
  }
  auto comb2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (double v : table) index += comb2(v);
  for (double v : rows) sum_rows += comb2(v);
  for (double v : cols) sum_cols += comb2(v);
  const double expected = sum_rows * sum_cols / comb2(static_cast<double>(n));
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

namespace {

bool is_cue_word(std::string_view w) {
  return w == "given" || w == "find" || w == "what" || w == "is" || w == "if" || w == "the" || w == "how" ||
         w == "which" || w == "we" || w == "know" || w == "that";
}

std::pair<std::string, std::string> split_clauses(const std::string& text) {
  std::string body = text;
  while (!body.empty() && (body.back() == '?' || body.back() == '.' || std::isspace(static_cast<unsigned char>(body.back()))))
    body.pop_back();
  auto comma = body.rfind(',');
  if (comma != std::string::npos) return {body.substr(0, comma), body.substr(comma + 1)};
  // No comma: split before the last question cue, if any.
  std::string lower;
  for (char c : body) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (const char* cue : {" find ", " what ", " how ", " which "}) {
    auto pos = lower.rfind(cue);
    if (pos != std::string::npos) return {body.substr(0, pos), body.substr(pos + 1)};
  }
  return {body, std::string()};
}

std::vector<std::string> side_keyphrases(std::span<const std::string> parts, std::size_t top_k) {
  std::vector<std::string> out;
  for (const auto& kp : textrank_keyphrases(parts, top_k)) out.push_back(kp.phrase);
  if (!out.empty()) return out;
  // Nothing survived stop-word filtering: keep the clause minus cue words.
  for (const auto& part : parts) {
    std::string phrase;
    for (const auto& tok : tokenize_lower(part)) {
      if (is_cue_word(tok)) continue;
      if (!phrase.empty()) phrase += ' ';
      phrase += tok;
    }
    if (!phrase.empty() && std::find(out.begin(), out.end(), phrase) == out.end()) out.push_back(phrase);
    if (out.size() == top_k) break;
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) s += ", ";
    s += items[k];
  }
  return s;
}

}  // namespace

SchemaDescription summarize_schema(std::size_t schema_id, std::span<const std::string> texts, std::size_t top_k) {
  SchemaDescription d;
  d.schema_id = schema_id;
  std::vector<std::string> conditions, objectives;
  for (const auto& t : texts) {
    if (t.empty()) continue;
    auto [cond, obj] = split_clauses(t);
    if (!cond.empty()) conditions.push_back(std::move(cond));
    if (!obj.empty()) objectives.push_back(std::move(obj));
  }
  if (conditions.empty() && objectives.empty()) {
    d.description = "schema-" + std::to_string(schema_id);
    return d;
  }
  d.condition_keyphrases = side_keyphrases(conditions, top_k);
  d.objective_keyphrases = side_keyphrases(objectives, top_k);
  if (!d.condition_keyphrases.empty() && !d.objective_keyphrases.empty()) {
    d.description = "Given " + join(d.condition_keyphrases) + ", find the " + join(d.objective_keyphrases) + "?";
  } else if (!d.condition_keyphrases.empty()) {
    d.description = "Given " + join(d.condition_keyphrases) + "?";
  } else if (!d.objective_keyphrases.empty()) {
    d.description = "Find the " + join(d.objective_keyphrases) + "?";
  } else {
    d.description = "schema-" + std::to_string(schema_id);
  }
  return d;
}

std::vector<SchemaDescription> summarize_schemas(const ExerciseCorpus& corpus, const AssignmentMatrix& assignment,
                                                 std::size_t top_k) {
  if (assignment.exercise_count() != corpus.exercise_count()) {
    throw DimensionError("assignment covers " + std::to_string(assignment.exercise_count()) +
                         " exercises, corpus has " + std::to_string(corpus.exercise_count()));
  }
  std::vector<std::vector<std::string>> texts(assignment.schema_count);
  for (const auto& ex : corpus.exercises()) {
    if (ex.text) texts[assignment.assign[ex.index]].push_back(*ex.text);
  }
  std::vector<SchemaDescription> out;
  out.reserve(assignment.schema_count);
  for (std::size_t s = 0; s < assignment.schema_count; ++s) out.push_back(summarize_schema(s, texts[s], top_k));
  return out;
}

}  // namespace hgkt
