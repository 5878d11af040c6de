#include "hgkt/model.hpp"

#include <algorithm>
#include <cmath>

#include "hgkt/errors.hpp"

namespace hgkt {

nlohmann::json model_config_to_json(const ModelConfig& c) {
  return {{"exer_dim", c.exer_dim},
          {"schema_dim", c.schema_dim},
          {"input_dim", c.input_dim},
          {"hidden", c.hidden},
          {"window", c.window},
          {"gnn_layers", c.layout.str()},
          {"ablation_preset", std::string(to_string(c.preset))},
          {"attention", c.attention},
          {"strict_eq14", c.strict_eq14},
          {"normalize_beta", c.normalize_beta},
          {"mean_pool", c.mean_pool},
          {"dropout", c.dropout}};
}

ModelConfig model_config_from_json(const nlohmann::json& doc) {
  try {
    ModelConfig c;
    c.exer_dim = doc.at("exer_dim").get<std::size_t>();
    c.schema_dim = doc.at("schema_dim").get<std::size_t>();
    c.input_dim = doc.at("input_dim").get<std::size_t>();
    c.hidden = doc.at("hidden").get<std::size_t>();
    c.window = doc.at("window").get<std::size_t>();
    c.layout = GnnLayout::parse(doc.at("gnn_layers").get<std::string>());
    c.preset = parse_schema_preset(doc.at("ablation_preset").get<std::string>());
    c.attention = doc.at("attention").get<bool>();
    c.strict_eq14 = doc.at("strict_eq14").get<bool>();
    c.normalize_beta = doc.at("normalize_beta").get<bool>();
    c.mean_pool = doc.at("mean_pool").get<bool>();
    c.dropout = doc.at("dropout").get<double>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model config: ") + e.what());
  }
}

Batch Batch::from(std::span<const LearnerSequence* const> sequences) {
  Batch b;
  b.size = sequences.size();
  for (const auto* s : sequences) b.steps = std::max(b.steps, s->events.size());
  b.exercise.assign(b.size * b.steps, 0);
  b.correct.assign(b.size * b.steps, 0);
  b.valid.assign(b.size * b.steps, 0);
  for (std::size_t i = 0; i < b.size; ++i) {
    const auto& ev = sequences[i]->events;
    for (std::size_t t = 0; t < ev.size(); ++t) {
      b.exercise[t * b.size + i] = ev[t].exercise;
      b.correct[t * b.size + i] = ev[t].correct;
      b.valid[t * b.size + i] = 1;
    }
  }
  return b;
}

Batch Batch::from(std::span<const LearnerSequence> sequences) {
  std::vector<const LearnerSequence*> ptrs;
  for (const auto& s : sequences) ptrs.push_back(&s);
  return from(std::span<const LearnerSequence* const>(ptrs));
}

std::size_t Batch::target_count() const {
  std::size_t n = 0;
  for (std::size_t k = size; k < valid.size(); ++k) n += valid[k];
  return n;
}

namespace nn {

namespace {

EncoderConfig encoder_config(const ModelConfig& c) {
  return {c.exer_dim, c.schema_dim, c.layout, c.preset, c.mean_pool};
}

SeqConfig seq_config(const ModelConfig& c, const Heg& heg) {
  SeqConfig s;
  s.knowledge_count = heg.knowledge_count();
  s.schema_count = heg.schema_count();
  s.schema_width = encoder_config(c).width();
  s.input_dim = c.input_dim;
  s.hidden = c.hidden;
  s.strict_eq14 = c.strict_eq14;
  return s;
}

template <typename T>
double max_abs(const Tensor<T>& t) {
  double m = 0;
  for (T v : t.values()) m = std::max(m, std::abs(static_cast<double>(v)));
  return m;
}

}  // namespace

template <typename T>
HgktModel<T>::HgktModel(ModelConfig config, const Heg& heg, std::uint64_t seed)
    : HgktModel(config, heg, std::mt19937_64(seed)) {}

template <typename T>
HgktModel<T>::HgktModel(ModelConfig config, const Heg& heg, std::mt19937_64&& rng)
    : config_(config), heg_(heg), encoder_(encoder_config(config), heg, rng), seq_(seq_config(config, heg), rng) {
  if (config_.dropout < 0.0 || config_.dropout >= 1.0) throw ValidationError("dropout must lie in [0, 1)");
  if (config_.window == 0) throw ValidationError("attention window must be positive");
}

template <typename T>
std::vector<NamedTensor<T>> HgktModel<T>::parameters() const {
  std::vector<NamedTensor<T>> all = encoder_.parameters();
  for (const auto& p : seq_.parameters()) all.push_back({"seq." + p.name, p.tensor});
  return all;
}

template <typename T>
std::vector<Tensor<T>> HgktModel<T>::parameter_tensors() const {
  std::vector<Tensor<T>> out;
  for (const auto& p : parameters()) out.push_back(p.tensor);
  return out;
}

template <typename T>
Cursor<T> HgktModel<T>::start(std::size_t batch) const {
  Cursor<T> c;
  c.state = seq_.initial_state(batch);
  c.history = HistoryBuffer<T>(config_.window);
  return c;
}

template <typename T>
void HgktModel<T>::observe(Cursor<T>& cursor, std::span<const std::size_t> exercises,
                           std::span<const std::uint8_t> correct, const SchemaEmbedding<T>& emb, bool train,
                           std::mt19937_64& rng) const {
  std::vector<std::size_t> knowledge(exercises.size());
  for (std::size_t b = 0; b < exercises.size(); ++b) {
    if (exercises[b] >= heg_.exercise_count()) throw DimensionError("observe: exercise index out of range");
    knowledge[b] = heg_.knowledge[exercises[b]];
  }
  Tensor<T> s = gather_rows(emb.exercise_rows, exercises);
  Tensor<T> x = seq_.make_input(knowledge, correct, s);
  cursor.state = seq_.lstm_step(x, cursor.state);
  cursor.m_cur = seq_.mastery_cur(dropout(cursor.state.h, config_.dropout, train, rng));
  cursor.history.push({cursor.m_cur, s});
  ++cursor.observed;
}

template <typename T>
Tensor<T> HgktModel<T>::predict_with(const Cursor<T>& cursor, std::span<const std::size_t> knowledge,
                                     const Tensor<T>& s_next, const SchemaEmbedding<T>& emb, bool train,
                                     std::mt19937_64& rng, ForwardTrace* trace) const {
  if (cursor.observed == 0) throw DimensionError("predict: no events observed yet");
  const std::size_t rows = s_next.rows(), schemas = heg_.schema_count();
  Tensor<T> m_att, m_f;
  if (config_.attention) {
    m_att = seq_attention(cursor.history.entries(), s_next, config_.window, schemas, config_.normalize_beta);
    SchemaAttention<T> sa = schema_attention(emb.memory_rows, s_next, cursor.m_cur);
    m_f = sa.m_f;
    if (trace) {
      auto a = sa.alpha.values();
      for (std::size_t r = 0; r < rows; ++r) {
        double total = 0;
        for (std::size_t j = 0; j < schemas; ++j) total += a[r * schemas + j];
        trace->max_alpha_sum_error = std::max(trace->max_alpha_sum_error, std::abs(total - 1.0));
      }
    }
  } else {
    m_att = Tensor<T>::zeros({rows, schemas});
    m_f = Tensor<T>::zeros({rows, 1});
  }
  if (trace) {
    trace->predictions += rows;
    trace->max_abs_m_att = std::max(trace->max_abs_m_att, max_abs(m_att));
    trace->max_abs_m_f = std::max(trace->max_abs_m_f, max_abs(m_f));
  }
  Tensor<T> z = seq_.predictor_input(m_att, cursor.m_cur, m_f, knowledge, s_next);
  return seq_.predict(dropout(z, config_.dropout, train, rng));
}

template <typename T>
Tensor<T> HgktModel<T>::predict_next(const Cursor<T>& cursor, std::span<const std::size_t> exercises,
                                     const SchemaEmbedding<T>& emb, bool train, std::mt19937_64& rng,
                                     ForwardTrace* trace) const {
  std::vector<std::size_t> knowledge(exercises.size());
  for (std::size_t b = 0; b < exercises.size(); ++b) {
    if (exercises[b] >= heg_.exercise_count()) throw DimensionError("predict: exercise index out of range");
    knowledge[b] = heg_.knowledge[exercises[b]];
  }
  return predict_with(cursor, knowledge, gather_rows(emb.exercise_rows, exercises), emb, train, rng, trace);
}

template <typename T>
Cursor<T> HgktModel<T>::broadcast(const Cursor<T>& cursor, std::size_t rows) const {
  std::vector<std::size_t> idx(rows, 0);
  std::span<const std::size_t> sp(idx);
  Cursor<T> out;
  out.state = {gather_rows(cursor.state.h, sp), gather_rows(cursor.state.c, sp)};
  out.history = HistoryBuffer<T>(cursor.history.capacity());
  for (const auto& e : cursor.history.entries()) out.history.push({gather_rows(e.m_cur, sp), gather_rows(e.s, sp)});
  if (cursor.m_cur.defined()) out.m_cur = gather_rows(cursor.m_cur, sp);
  out.observed = cursor.observed;
  return out;
}

template <typename T>
BatchOutput<T> HgktModel<T>::forward(const Batch& batch, bool train, std::mt19937_64& rng,
                                     ForwardTrace* trace) const {
  if (batch.steps < 2) throw DimensionError("forward: batch needs at least two steps");
  const std::size_t B = batch.size;
  SchemaEmbedding<T> emb = encoder_.forward();
  Cursor<T> cursor = start(B);
  BatchOutput<T> out;
  std::vector<Tensor<T>> preds;
  for (std::size_t t = 0; t + 1 < batch.steps; ++t) {
    std::span<const std::size_t> ex(batch.exercise.data() + t * B, B);
    std::span<const std::uint8_t> cr(batch.correct.data() + t * B, B);
    observe(cursor, ex, cr, emb, train, rng);
    std::span<const std::size_t> next(batch.exercise.data() + (t + 1) * B, B);
    preds.push_back(predict_next(cursor, next, emb, train, rng, trace));
    for (std::size_t b = 0; b < B; ++b) {
      const std::size_t k = (t + 1) * B + b;
      out.labels.push_back(static_cast<T>(batch.correct[k]));
      out.mask.push_back(batch.valid[k] ? T(1) : T(0));
      out.count += batch.valid[k];
    }
  }
  out.predictions = concat(preds, 0);
  return out;
}

template <typename T>
Tensor<T> HgktModel<T>::loss(const BatchOutput<T>& out) const {
  Tensor<T> total = sequence_loss(out.predictions, std::span<const T>(out.labels), std::span<const T>(out.mask));
  return scale(total, T(1) / static_cast<T>(std::max<std::size_t>(out.count, 1)));
}

template class HgktModel<float>;
template class HgktModel<double>;

}  // namespace nn
}  // namespace hgkt
