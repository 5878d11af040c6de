#include "hgkt/seq_model.hpp"

#include "hgkt/errors.hpp"

namespace hgkt::nn {

namespace {
enum Param : std::size_t { kInOneHot, kInSchema, kInBias, kWx, kWh, kLstmBias, kW1, kB1, kW2, kB2 };
}

template <typename T>
SeqModel<T>::SeqModel(SeqConfig config, std::mt19937_64& rng) : config_(config) {
  const std::size_t k2 = 2 * config_.knowledge_count, w = config_.schema_width, d = config_.input_dim,
                    h = config_.hidden, s = config_.schema_count, z = config_.predictor_width();
  if (config_.knowledge_count == 0 || s == 0 || d == 0 || h == 0) {
    throw DimensionError("sequence model needs non-empty knowledge, schema, input and hidden sizes");
  }
  auto add = [&](const char* name, Shape shape, std::size_t fan_in) {
    params_.push_back({name, Tensor<T>::parameter(shape, uniform_init<T>(shape.size(), fan_in, rng))});
  };
  add("input.onehot_weight", {k2, d}, k2 + w);
  add("input.schema_weight", {w, d}, k2 + w);
  add("input.bias", {1, d}, k2 + w);
  add("lstm.input_weight", {d, 4 * h}, d + h);
  add("lstm.hidden_weight", {h, 4 * h}, d + h);
  add("lstm.bias", {1, 4 * h}, d + h);
  add("mastery.weight", {h, s}, h);
  add("mastery.bias", {1, s}, h);
  add("predict.weight", {z, 1}, z);
  add("predict.bias", {1, 1}, z);
}

template <typename T>
Tensor<T> SeqModel<T>::make_input(std::span<const std::size_t> knowledge, std::span<const std::uint8_t> correct,
                                  const Tensor<T>& s) const {
  const std::size_t kc = config_.knowledge_count;
  if (knowledge.size() != correct.size() || s.rows() != knowledge.size() || s.cols() != config_.schema_width) {
    throw DimensionError("make_input: " + std::to_string(knowledge.size()) + " events vs schema rows " +
                         s.shape().str());
  }
  std::vector<std::size_t> idx(knowledge.size());
  for (std::size_t b = 0; b < idx.size(); ++b) {
    if (knowledge[b] >= kc) {
      throw DimensionError("make_input: knowledge index " + std::to_string(knowledge[b]) + " out of range");
    }
    if (correct[b] > 1) throw DimensionError("make_input: correctness must be 0 or 1");
    idx[b] = knowledge[b] + correct[b] * kc;
  }
  // onehot * W is a row lookup
  Tensor<T> pre = add(gather_rows(p(kInOneHot), std::span<const std::size_t>(idx)), matmul(s, p(kInSchema)));
  return tanh(add(pre, p(kInBias)));
}

template <typename T>
LstmState<T> SeqModel<T>::initial_state(std::size_t batch) const {
  return {Tensor<T>::zeros({batch, config_.hidden}), Tensor<T>::zeros({batch, config_.hidden})};
}

template <typename T>
LstmState<T> SeqModel<T>::lstm_step(const Tensor<T>& x, const LstmState<T>& state) const {
  const std::size_t h = config_.hidden;
  Tensor<T> gates = add(add(matmul(x, p(kWx)), matmul(state.h, p(kWh))), p(kLstmBias));
  Tensor<T> i = sigmoid(slice(gates, 1, 0, h));
  Tensor<T> f = sigmoid(slice(gates, 1, h, 2 * h));
  Tensor<T> g = tanh(slice(gates, 1, 2 * h, 3 * h));
  Tensor<T> o = sigmoid(slice(gates, 1, 3 * h, 4 * h));
  Tensor<T> c = add(mul(f, state.c), mul(i, g));
  return {mul(o, tanh(c)), c};
}

template <typename T>
Tensor<T> SeqModel<T>::mastery_cur(const Tensor<T>& h) const {
  return relu(add(matmul(h, p(kW1)), p(kB1)));
}

template <typename T>
Tensor<T> SeqModel<T>::predictor_input(const Tensor<T>& m_att, const Tensor<T>& m_cur, const Tensor<T>& m_f,
                                       std::span<const std::size_t> next_knowledge, const Tensor<T>& s_next) const {
  std::vector<Tensor<T>> parts{m_att, m_cur, m_f};
  if (!config_.strict_eq14) parts.push_back(one_hot_rows<T>(next_knowledge, config_.knowledge_count));
  parts.push_back(s_next);
  return concat(parts, 1);
}

template <typename T>
Tensor<T> SeqModel<T>::predict(const Tensor<T>& z) const {
  return sigmoid(add(matmul(z, p(kW2)), p(kB2)));
}

template <typename T>
Tensor<T> seq_attention(std::span<const HistoryEntry<T>> history, const Tensor<T>& s_next, std::size_t window,
                        std::size_t mastery_dim, bool normalize) {
  const std::size_t begin = history.size() > window ? history.size() - window : 0;
  if (begin == history.size()) return Tensor<T>::zeros({s_next.rows(), mastery_dim});
  std::vector<Tensor<T>> betas;
  for (std::size_t i = begin; i < history.size(); ++i) betas.push_back(cosine(s_next, history[i].s));
  if (normalize) {
    Tensor<T> w = softmax(concat(betas, 1), 1);
    for (std::size_t i = 0; i < betas.size(); ++i) betas[i] = slice(w, 1, i, i + 1);
  }
  Tensor<T> out = mul(betas[0], history[begin].m_cur);
  for (std::size_t i = begin + 1; i < history.size(); ++i) out = add(out, mul(betas[i - begin], history[i].m_cur));
  return out;
}

template <typename T>
SchemaAttention<T> schema_attention(const Tensor<T>& memory_rows, const Tensor<T>& s_next, const Tensor<T>& m_cur) {
  Tensor<T> alpha = softmax(matmul(s_next, transpose(memory_rows)), 1);
  return {alpha, sum(mul(alpha, m_cur), 1)};
}

template <typename T>
Tensor<T> sequence_loss(const Tensor<T>& predictions, std::span<const T> labels, std::span<const T> mask) {
  return binary_cross_entropy(predictions, labels, mask);
}

#define HGKT_INSTANTIATE(T)                                                                                       \
  template class SeqModel<T>;                                                                                     \
  template Tensor<T> seq_attention(std::span<const HistoryEntry<T>>, const Tensor<T>&, std::size_t, std::size_t, \
                                   bool);                                                                         \
  template SchemaAttention<T> schema_attention(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);            \
  template Tensor<T> sequence_loss(const Tensor<T>&, std::span<const T>, std::span<const T>);

HGKT_INSTANTIATE(float)
HGKT_INSTANTIATE(double)

}  // namespace hgkt::nn
