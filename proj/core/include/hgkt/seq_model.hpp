#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "hgkt/hgnn.hpp"
#include "hgkt/tensor.hpp"

namespace hgkt::nn {

struct SeqConfig {
  std::size_t knowledge_count = 0;
  std::size_t schema_count = 0;  // length of m_cur
  std::size_t schema_width = 30; // length of s
  std::size_t input_dim = 100;
  std::size_t hidden = 200;
  bool strict_eq14 = false;      // drop v_next from the predictor input

  /// Width of [m_att; m_cur; m_f; v_next; s_next].
  std::size_t predictor_width() const {
    return 2 * schema_count + 1 + (strict_eq14 ? 0 : knowledge_count) + schema_width;
  }
};

template <typename T>
struct LstmState {
  Tensor<T> h;
  Tensor<T> c;
};

template <typename T>
struct HistoryEntry {
  Tensor<T> m_cur;  // B x |S|
  Tensor<T> s;      // B x width
};

/// Last `capacity` (m_cur, s) pairs, oldest evicted first.
template <typename T>
class HistoryBuffer {
 public:
  explicit HistoryBuffer(std::size_t capacity) : capacity_(capacity) {}

  void push(HistoryEntry<T> entry) {
    if (capacity_ == 0) return;
    if (entries_.size() == capacity_) entries_.erase(entries_.begin());
    entries_.push_back(std::move(entry));
  }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::span<const HistoryEntry<T>> entries() const { return entries_; }
  std::vector<HistoryEntry<T>>& mutable_entries() { return entries_; }

 private:
  std::size_t capacity_;
  std::vector<HistoryEntry<T>> entries_;
};

/// Input fusion, LSTM cell, current-mastery head and predictor weights.
template <typename T>
class SeqModel {
 public:
  SeqModel(SeqConfig config, std::mt19937_64& rng);

  /// x = tanh([onehot(k + r|K|); s] W_in + b_in), one row per batch entry.
  Tensor<T> make_input(std::span<const std::size_t> knowledge, std::span<const std::uint8_t> correct,
                       const Tensor<T>& s) const;
  LstmState<T> initial_state(std::size_t batch) const;
  LstmState<T> lstm_step(const Tensor<T>& x, const LstmState<T>& state) const;
  /// relu(h W_1 + b_1).
  Tensor<T> mastery_cur(const Tensor<T>& h) const;
  /// Predictor input [m_att; m_cur; m_f; v_next; s_next] (v_next omitted in strict mode).
  Tensor<T> predictor_input(const Tensor<T>& m_att, const Tensor<T>& m_cur, const Tensor<T>& m_f,
                            std::span<const std::size_t> next_knowledge, const Tensor<T>& s_next) const;
  /// sigmoid(z W_2 + b_2) -> B x 1.
  Tensor<T> predict(const Tensor<T>& z) const;

  const SeqConfig& config() const { return config_; }
  std::vector<NamedTensor<T>>& parameters() { return params_; }
  const std::vector<NamedTensor<T>>& parameters() const { return params_; }

 private:
  const Tensor<T>& p(std::size_t i) const { return params_[i].tensor; }

  SeqConfig config_;
  std::vector<NamedTensor<T>> params_;
};

/// Sum over the last `window` entries of cos(s_next, s_i) * m_cur_i, with
/// the weights used as-is unless `normalize` (then softmax over the window).
/// Zeros of width `mastery_dim` when the window is empty.
template <typename T>
Tensor<T> seq_attention(std::span<const HistoryEntry<T>> history, const Tensor<T>& s_next, std::size_t window,
                        std::size_t mastery_dim, bool normalize = false);

template <typename T>
struct SchemaAttention {
  Tensor<T> alpha;  // B x |S|
  Tensor<T> m_f;    // B x 1
};

/// alpha = softmax(s_next M_sc), m_f = alpha . m_cur. `memory_rows` is M_sc
/// transposed (|S| x width).
template <typename T>
SchemaAttention<T> schema_attention(const Tensor<T>& memory_rows, const Tensor<T>& s_next, const Tensor<T>& m_cur);

/// Masked binary cross-entropy summed over steps.
template <typename T>
Tensor<T> sequence_loss(const Tensor<T>& predictions, std::span<const T> labels, std::span<const T> mask);

}  // namespace hgkt::nn
