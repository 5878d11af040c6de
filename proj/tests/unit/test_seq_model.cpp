#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hgkt/errors.hpp"
#include "hgkt/model.hpp"
#include "hgkt/seq_model.hpp"

using namespace hgkt;
using namespace hgkt::nn;

namespace {

using T = Tensor<double>;

T row(std::vector<double> v) { return T::constant({1, v.size()}, v); }

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

SeqConfig micro_config() {
  SeqConfig c;
  c.knowledge_count = 2;
  c.schema_count = 3;
  c.schema_width = 2;
  c.input_dim = 3;
  c.hidden = 2;
  return c;
}

Tensor<double>& param(SeqModel<double>& m, const std::string& name) {
  for (auto& p : m.parameters())
    if (p.name == name) return p.tensor;
  throw std::runtime_error("no parameter " + name);
}

void fill(Tensor<double>& t, double v) {
  for (auto& x : t.mutable_values()) x = v;
}

std::vector<HistoryEntry<double>> random_history(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<HistoryEntry<double>> h;
  for (std::size_t i = 0; i < n; ++i) h.push_back({row({u(rng), u(rng), u(rng)}), row({u(rng), u(rng)})});
  return h;
}

}  // namespace

TEST(History, EvictsOldestAtCapacity) {
  HistoryBuffer<double> h(2);
  for (double v : {1.0, 2.0, 3.0}) h.push({row({v}), row({v})});
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h.entries()[0].m_cur.item(), 2.0);
  EXPECT_EQ(h.entries()[1].m_cur.item(), 3.0);
}

TEST(MakeInput, ZeroWeightsGiveZero) {
  std::mt19937_64 rng(1);
  SeqModel<double> m(micro_config(), rng);
  for (auto name : {"input.onehot_weight", "input.schema_weight", "input.bias"}) fill(param(m, name), 0.0);
  std::vector<std::size_t> k = {1};
  std::vector<std::uint8_t> r = {1};
  auto x = m.make_input(k, r, row({0.3, -2}));
  for (double v : x.values()) EXPECT_EQ(v, 0.0);
  std::vector<std::size_t> bad = {2};
  EXPECT_THROW(m.make_input(bad, r, row({0, 0})), DimensionError);
}

TEST(MakeInput, OneHotIndexAndHandArithmetic) {
  std::mt19937_64 rng(1);
  SeqModel<double> m(micro_config(), rng);
  auto& w = param(m, "input.onehot_weight");  // 4 x 3
  for (std::size_t i = 0; i < 12; ++i) w.mutable_values()[i] = 0.1 * static_cast<double>(i);
  auto& ws = param(m, "input.schema_weight");  // 2 x 3
  for (std::size_t i = 0; i < 6; ++i) ws.mutable_values()[i] = 0.05 * static_cast<double>(i) - 0.1;
  auto& b = param(m, "input.bias");
  b.mutable_values()[0] = 0.2;
  b.mutable_values()[1] = -0.1;
  b.mutable_values()[2] = 0.0;
  // k = 0, r = 1 selects one-hot index 2 of the length-4 prefix.
  std::vector<std::size_t> k = {0};
  std::vector<std::uint8_t> r = {1};
  const double s0 = 0.5, s1 = -1.0;
  auto x = m.make_input(k, r, row({s0, s1}));
  for (std::size_t c = 0; c < 3; ++c) {
    const double pre = w.at(2, c) + s0 * ws.at(0, c) + s1 * ws.at(1, c) + b.values()[c];
    EXPECT_NEAR(x.values()[c], std::tanh(pre), 1e-15);
  }
}

TEST(Lstm, HandGateEquations) {
  std::mt19937_64 rng(7);
  SeqModel<double> m(micro_config(), rng);
  const auto& wx = param(m, "lstm.input_weight");
  const auto& wh = param(m, "lstm.hidden_weight");
  const auto& bias = param(m, "lstm.bias");
  const std::vector<double> x = {0.3, -0.7, 0.9}, h0 = {0.2, -0.4}, c0 = {0.5, 0.1};
  auto st = m.lstm_step(row(x), {row(h0), row(c0)});
  for (std::size_t j = 0; j < 2; ++j) {
    double g[4];
    for (std::size_t q = 0; q < 4; ++q) {
      const std::size_t col = q * 2 + j;
      double acc = bias.values()[col];
      for (std::size_t a = 0; a < 3; ++a) acc += x[a] * wx.at(a, col);
      for (std::size_t a = 0; a < 2; ++a) acc += h0[a] * wh.at(a, col);
      g[q] = acc;
    }
    const double c = sig(g[1]) * c0[j] + sig(g[0]) * std::tanh(g[2]);
    EXPECT_NEAR(st.c.values()[j], c, 1e-12);
    EXPECT_NEAR(st.h.values()[j], sig(g[3]) * std::tanh(c), 1e-12);
  }
}

TEST(Lstm, GateSemantics) {
  std::mt19937_64 rng(1);
  SeqModel<double> m(micro_config(), rng);
  for (auto name : {"lstm.input_weight", "lstm.hidden_weight", "lstm.bias"}) fill(param(m, name), 0.0);
  auto st = m.lstm_step(row({1, 2, 3}), m.initial_state(1));
  for (double v : st.h.values()) EXPECT_EQ(v, 0.0);
  // Forget gate saturated open, input gate shut: the cell is carried over.
  auto& b = param(m, "lstm.bias");
  for (std::size_t j = 0; j < 2; ++j) {
    b.mutable_values()[j] = -1e4;
    b.mutable_values()[2 + j] = 1e4;
  }
  auto kept = m.lstm_step(row({1, 2, 3}), {row({0.1, 0.2}), row({0.7, -0.3})});
  EXPECT_DOUBLE_EQ(kept.c.values()[0], 0.7);
  EXPECT_DOUBLE_EQ(kept.c.values()[1], -0.3);
}

TEST(Mastery, ReluOfBiasAtZeroState) {
  std::mt19937_64 rng(1);
  SeqModel<double> m(micro_config(), rng);
  auto& b = param(m, "mastery.bias");
  b.mutable_values()[0] = -0.5;
  b.mutable_values()[1] = 0.25;
  b.mutable_values()[2] = 1.0;
  auto mc = m.mastery_cur(T::zeros({1, 2}));
  EXPECT_EQ(std::vector<double>(mc.values().begin(), mc.values().end()), (std::vector<double>{0, 0.25, 1.0}));
  std::mt19937_64 r2(3);
  std::normal_distribution<double> g(0, 5);
  for (int i = 0; i < 20; ++i) {
    for (double v : m.mastery_cur(row({g(r2), g(r2)})).values()) EXPECT_GE(v, 0.0);
  }
}

TEST(Predict, ZeroWeightsGiveHalfAndWidthFollowsMode) {
  std::mt19937_64 rng(1);
  auto cfg = micro_config();
  SeqModel<double> m(cfg, rng);
  EXPECT_EQ(cfg.predictor_width(), 2 * 3 + 1 + 2 + 2u);
  fill(param(m, "predict.weight"), 0.0);
  fill(param(m, "predict.bias"), 0.0);
  std::vector<std::size_t> k = {1};
  auto z = m.predictor_input(row({1, 2, 3}), row({0, 1, 0}), row({0.4}), k, row({0.1, 0.2}));
  EXPECT_EQ(z.cols(), cfg.predictor_width());
  EXPECT_EQ(z.at(0, 8), 1.0);
  EXPECT_DOUBLE_EQ(m.predict(z).item(), 0.5);
  param(m, "predict.bias").mutable_values()[0] = 40.0;
  EXPECT_GT(m.predict(z).item(), 1.0 - 1e-12);

  cfg.strict_eq14 = true;
  std::mt19937_64 r2(1);
  SeqModel<double> strict(cfg, r2);
  EXPECT_EQ(cfg.predictor_width(), 2 * 3 + 1 + 2u);
  EXPECT_EQ(strict.predictor_input(row({1, 2, 3}), row({0, 1, 0}), row({0.4}), k, row({0.1, 0.2})).cols(), 9u);
}

TEST(Predict, HandDotProduct) {
  std::mt19937_64 rng(2);
  SeqModel<double> m(micro_config(), rng);
  std::vector<std::size_t> k = {0};
  auto z = m.predictor_input(row({0.1, -0.2, 0.3}), row({0, 1, 2}), row({0.5}), k, row({-1, 1}));
  const auto& w = param(m, "predict.weight");
  double acc = param(m, "predict.bias").item();
  for (std::size_t i = 0; i < z.cols(); ++i) acc += z.values()[i] * w.values()[i];
  EXPECT_NEAR(m.predict(z).item(), sig(acc), 1e-15);
}

TEST(SeqAttention, Examples) {
  std::vector<HistoryEntry<double>> none;
  auto z = seq_attention<double>(none, row({1, 0}), 20, 3);
  for (double v : z.values()) EXPECT_EQ(v, 0.0);

  std::vector<HistoryEntry<double>> same = {{row({1, 2, 3}), row({0.5, 0.5})}, {row({4, 5, 6}), row({0.5, 0.5})}};
  auto s = seq_attention<double>(same, row({1, 1}), 20, 3);
  EXPECT_NEAR(s.values()[0], 5.0, 1e-12);
  EXPECT_NEAR(s.values()[2], 9.0, 1e-12);

  // cosines 0.5 and -0.5 against s_next = (1, 0)
  const double r3 = std::sqrt(3.0);
  std::vector<HistoryEntry<double>> mixed = {{row({2, 0, 1}), row({1, r3})}, {row({0, 4, 1}), row({-1, r3})}};
  auto m = seq_attention<double>(mixed, row({1, 0}), 20, 3);
  EXPECT_NEAR(m.values()[0], 1.0, 1e-12);
  EXPECT_NEAR(m.values()[1], -2.0, 1e-12);
  EXPECT_NEAR(m.values()[2], 0.0, 1e-12);
}

TEST(SeqAttention, LinearInWindowLengthForIdenticalSchemas) {
  std::vector<HistoryEntry<double>> h;
  for (int n = 1; n <= 6; ++n) {
    h.push_back({row({1, 0.5, 2}), row({0.3, -0.2})});
    auto m = seq_attention<double>(h, row({0.3, -0.2}), 20, 3);
    EXPECT_NEAR(m.values()[2], 2.0 * n, 1e-12);
  }
}

TEST(SeqAttention, OlderEntriesNeverRead) {
  std::mt19937_64 rng(4);
  auto h = random_history(30, rng);
  const auto s_next = row({0.4, -0.9});
  auto base = seq_attention<double>(h, s_next, 20, 3);
  h[9] = {row({100, 100, 100}), row({-5, 5})};
  auto after = seq_attention<double>(h, s_next, 20, 3);
  EXPECT_TRUE(std::equal(base.values().begin(), base.values().end(), after.values().begin()));
  h[10].m_cur.mutable_values()[0] += 1.0;
  auto changed = seq_attention<double>(h, s_next, 20, 3);
  EXPECT_NE(changed.values()[0], base.values()[0]);
}

TEST(SeqAttention, NormalizedWeightsSumToOne) {
  std::vector<HistoryEntry<double>> h = {{row({1}), row({1, 0})}, {row({1}), row({0, 1})}, {row({1}), row({-1, 0})}};
  auto m = seq_attention<double>(h, row({1, 0}), 20, 1, true);
  EXPECT_NEAR(m.item(), 1.0, 1e-12);
}

TEST(SchemaAttention, Examples) {
  auto same = T::constant({3, 2}, {0.5, 1, 0.5, 1, 0.5, 1});
  auto a = schema_attention(same, row({2, -1}), row({0.3, 0.6, 0.9}));
  for (double v : a.alpha.values()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(a.m_f.item(), 0.6, 1e-12);

  auto mem = T::constant({2, 1}, {std::log(3.0), 0.0});
  auto b = schema_attention(mem, row({1}), row({1, 0}));
  EXPECT_NEAR(b.alpha.values()[0], 0.75, 1e-12);
  EXPECT_NEAR(b.alpha.values()[1], 0.25, 1e-12);
  EXPECT_NEAR(b.m_f.item(), 0.75, 1e-12);
}

TEST(SequenceLoss, HandExample) {
  std::vector<double> y = {1, 0};
  std::vector<double> mask = {1, 1};
  auto l = sequence_loss(T::constant({2, 1}, {0.9, 0.2}), std::span<const double>(y), std::span<const double>(mask));
  EXPECT_NEAR(l.item(), 0.3285040669, 1e-9);
}

namespace {

Heg tiny_heg() {
  ExerciseCorpus c;
  for (std::size_t i = 0; i < 6; ++i) c.add("e" + std::to_string(i), "k" + std::to_string(i % 3));
  DirectSupportGraph g;
  g.n = 6;
  g.adjacency.assign(36, 0);
  g.adjacency[0 * 6 + 1] = g.adjacency[2 * 6 + 3] = g.adjacency[4 * 6 + 5] = 1;
  std::vector<std::size_t> labels = {0, 0, 1, 1, 2, 2};
  return make_heg(c, std::move(g), AssignmentMatrix::from_labels(labels));
}

std::vector<LearnerSequence> tiny_sequences() {
  std::vector<LearnerSequence> s(3);
  std::mt19937_64 rng(1);
  for (std::size_t l = 0; l < 3; ++l) {
    s[l].learner = l;
    for (std::size_t t = 0; t < 4 + 2 * l; ++t)
      s[l].events.push_back({l, rng() % 6, static_cast<std::uint8_t>(rng() % 2), static_cast<std::int64_t>(t)});
  }
  return s;
}

ModelConfig tiny_model() {
  ModelConfig c;
  c.exer_dim = 6;
  c.schema_dim = 4;
  c.input_dim = 5;
  c.hidden = 7;
  c.window = 3;
  c.dropout = 0.0;
  return c;
}

}  // namespace

TEST(Model, AttentionOffZeroesBothTerms) {
  auto cfg = tiny_model();
  cfg.attention = false;
  HgktModel<double> m(cfg, tiny_heg(), 1);
  auto seqs = tiny_sequences();
  std::mt19937_64 rng(1);
  ForwardTrace trace;
  m.forward(Batch::from(std::span<const LearnerSequence>(seqs)), false, rng, &trace);
  EXPECT_GT(trace.predictions, 0u);
  EXPECT_EQ(trace.max_abs_m_att, 0.0);
  EXPECT_EQ(trace.max_abs_m_f, 0.0);

  HgktModel<double> on(tiny_model(), tiny_heg(), 1);
  ForwardTrace t2;
  on.forward(Batch::from(std::span<const LearnerSequence>(seqs)), false, rng, &t2);
  EXPECT_GT(t2.max_abs_m_f, 0.0);
  EXPECT_LT(t2.max_alpha_sum_error, 1e-6);
}

TEST(Model, PaddingDoesNotChangeLossOrGradients) {
  HgktModel<double> m(tiny_model(), tiny_heg(), 2);
  auto seqs = tiny_sequences();
  auto loss_and_grads = [&](std::span<const LearnerSequence> batch_seqs) {
    auto params = m.parameter_tensors();
    for (auto& p : params) p.zero_grad();
    Tape<double> tape;
    double value = 0.0;
    {
      TapeScope<double> scope(tape);
      std::mt19937_64 rng(1);
      auto l = m.loss(m.forward(Batch::from(batch_seqs), false, rng));
      value = l.item();
      tape.backward(l);
    }
    std::vector<double> g;
    for (auto& p : params) {
      auto gr = p.grad();
      if (gr.empty()) g.insert(g.end(), p.size(), 0.0);
      else g.insert(g.end(), gr.begin(), gr.end());
    }
    return std::make_pair(value, g);
  };
  // Rows never interact, so the padded batch is the target-weighted mix of per-learner runs.
  std::vector<LearnerSequence> first = {seqs[0]};
  std::vector<LearnerSequence> last = {seqs[2]};
  std::vector<LearnerSequence> both = {seqs[0], seqs[2]};
  auto a = loss_and_grads(first);
  auto b = loss_and_grads(last);
  auto ab = loss_and_grads(both);
  const double na = static_cast<double>(seqs[0].events.size() - 1);
  const double nb = static_cast<double>(seqs[2].events.size() - 1);
  auto padded = Batch::from(std::span<const LearnerSequence>(both));
  EXPECT_EQ(padded.steps, seqs[2].events.size());
  EXPECT_EQ(padded.target_count(), static_cast<std::size_t>(na + nb));
  EXPECT_NEAR(ab.first, (na * a.first + nb * b.first) / (na + nb), 1e-12);
  ASSERT_EQ(ab.second.size(), a.second.size());
  for (std::size_t i = 0; i < ab.second.size(); ++i) {
    EXPECT_NEAR(ab.second[i], (na * a.second[i] + nb * b.second[i]) / (na + nb), 1e-12);
  }
}

TEST(Model, StrictModeGivesKnowledgeConstantPredictions) {
  auto cfg = tiny_model();
  cfg.strict_eq14 = true;
  HgktModel<double> m(cfg, tiny_heg(), 3);
  auto emb = m.encode_schemas();
  auto cur = m.start(1);
  std::mt19937_64 rng(1);
  std::vector<std::size_t> ex = {2};
  std::vector<std::uint8_t> r = {1};
  m.observe(cur, ex, r, emb, false, rng);
  auto rows = m.broadcast(cur, 3);
  std::vector<std::size_t> ks = {0, 1, 2};
  auto s_row = slice(emb.memory_rows, 0, 1, 2);
  auto s = concat<double>({s_row, s_row, s_row}, 0);
  auto p = m.predict_with(rows, ks, s, emb, false, rng);
  EXPECT_EQ(p.values()[0], p.values()[1]);
  EXPECT_EQ(p.values()[1], p.values()[2]);

  HgktModel<double> loose(tiny_model(), tiny_heg(), 3);
  auto emb2 = loose.encode_schemas();
  auto c2 = loose.start(1);
  loose.observe(c2, ex, r, emb2, false, rng);
  auto s2_row = slice(emb2.memory_rows, 0, 1, 2);
  auto p2 = loose.predict_with(loose.broadcast(c2, 3), ks, concat<double>({s2_row, s2_row, s2_row}, 0), emb2,
                               false, rng);
  EXPECT_NE(p2.values()[0], p2.values()[1]);
}
