#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>

#include "hgkt/diagnosis.hpp"
#include "hgkt/model.hpp"
#include "support/oracles.hpp"

using namespace hgkt;

namespace {

QCounts hand_q() {
  std::vector<std::size_t> knowledge = {0, 0, 1, 1};
  std::vector<std::size_t> schema = {0, 0, 0, 1};
  return q_counts(knowledge, 2, AssignmentMatrix::from_labels(schema));
}

KsMatrix hand_r() {
  KsMatrix r;
  r.knowledge = 2;
  r.schemas = 2;
  r.values = {0.8, 0.2, 0.6, 0.4};
  return r;
}

Heg tiny_heg() {
  ExerciseCorpus c;
  for (std::size_t i = 0; i < 6; ++i) c.add("e" + std::to_string(i), "k" + std::to_string(i % 2));
  DirectSupportGraph g;
  g.n = 6;
  g.adjacency.assign(36, 0);
  g.adjacency[1] = g.adjacency[6 * 2 + 3] = 1;
  std::vector<std::size_t> labels = {0, 0, 1, 1, 2, 2};
  return make_heg(c, std::move(g), AssignmentMatrix::from_labels(labels));
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

TEST(QCounts, HandExample) {
  auto q = hand_q();
  EXPECT_EQ(q.q, (std::vector<std::size_t>{2, 0, 1, 1}));
  EXPECT_EQ(q.total(), 4u);
}

TEST(QCounts, SingleAndIdentity) {
  std::vector<std::size_t> k1 = {0};
  auto q1 = q_counts(k1, 1, AssignmentMatrix::identity(1));
  EXPECT_EQ(q1.q, (std::vector<std::size_t>{1}));
  std::vector<std::size_t> k3 = {2, 0, 1};
  auto q3 = q_counts(k3, 3, AssignmentMatrix::identity(3));
  for (std::size_t i = 0; i < 3; ++i) {
    std::size_t row = 0;
    for (std::size_t j = 0; j < 3; ++j) row += q3.at(i, j);
    EXPECT_EQ(row, 1u);
  }
}

TEST(QCounts, InvariantToCorpusOrder) {
  std::vector<std::size_t> k = {0, 1, 1, 2, 0};
  std::vector<std::size_t> s = {0, 1, 2, 1, 1};
  auto a = q_counts(k, 3, AssignmentMatrix::from_labels(s));
  std::vector<std::size_t> kr(k.rbegin(), k.rend());
  std::vector<std::size_t> sr(s.rbegin(), s.rend());
  auto b = q_counts(kr, 3, AssignmentMatrix::from_labels(sr));
  // Reversal renumbers schemas; compare the multiset of (knowledge, size) cells per schema.
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<std::size_t> ra, rb;
    for (std::size_t j = 0; j < a.schemas; ++j) ra.push_back(a.at(i, j));
    for (std::size_t j = 0; j < b.schemas; ++j) rb.push_back(b.at(i, j));
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    EXPECT_EQ(ra, rb);
  }
  EXPECT_EQ(a.total(), b.total());
}

TEST(Marginals, HandExample) {
  auto q = hand_q();
  auto rk = knowledge_mastery(hand_r(), q);
  auto rs = schema_mastery(hand_r(), q);
  EXPECT_NEAR(*rk[0], 0.8, 1e-12);
  EXPECT_NEAR(*rk[1], 0.5, 1e-12);
  EXPECT_NEAR(*rs[0], 0.8 * 2.0 / 3.0 + 0.6 / 3.0, 1e-12);
  EXPECT_NEAR(*rs[1], 0.4, 1e-12);
}

TEST(Marginals, WeightsSumExactlyAndEmptyRowsOmitted) {
  std::vector<std::size_t> k = {0, 0, 0, 2, 2, 0, 2};
  std::vector<std::size_t> s = {0, 1, 2, 0, 0, 1, 2};
  auto q = q_counts(k, 3, AssignmentMatrix::from_labels(s));
  auto dk = knowledge_weights(q);
  auto ds = schema_weights(q);
  for (std::size_t i = 0; i < 3; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < 3; ++j) sum += dk[i * 3 + j];
    EXPECT_EQ(sum, i == 1 ? 0.0 : 1.0);
  }
  for (std::size_t j = 0; j < 3; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < 3; ++i) sum += ds[i * 3 + j];
    EXPECT_EQ(sum, 1.0);
  }
  KsMatrix r;
  r.knowledge = 3;
  r.schemas = 3;
  r.values = {0.1, 0.9, 0.5, 0.3, 0.3, 0.3, 0.7, 0.2, 0.6};
  auto rk = knowledge_mastery(r, q);
  EXPECT_FALSE(rk[1].has_value());
  for (auto& v : rk) {
    if (v) {
      EXPECT_GE(*v, 0.1);
      EXPECT_LE(*v, 0.9);
    }
  }
}

TEST(Marginals, WeightSumsExactOnRandomCounts) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 2000; ++rep) {
    const std::size_t n = 1 + rng() % 40, k = 1 + rng() % 6;
    std::vector<std::size_t> kn(n), sc(n);
    for (auto& x : kn) x = rng() % k;
    for (auto& x : sc) x = rng() % 8;
    auto q = q_counts(kn, k, AssignmentMatrix::from_labels(sc));
    auto dk = knowledge_weights(q);
    auto ds = schema_weights(q);
    for (std::size_t i = 0; i < q.knowledge; ++i) {
      double row = 0.0;
      std::size_t hits = 0;
      for (std::size_t j = 0; j < q.schemas; ++j) row += dk[i * q.schemas + j], hits += q.at(i, j);
      if (hits) ASSERT_EQ(row, 1.0) << rep;
    }
    for (std::size_t j = 0; j < q.schemas; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < q.knowledge; ++i) col += ds[i * q.schemas + j];
      ASSERT_EQ(col, 1.0) << rep;
      for (std::size_t i = 0; i < q.knowledge; ++i)
        EXPECT_NEAR(ds[i * q.schemas + j], static_cast<double>(q.at(i, j)) / [&] {
          std::size_t c = 0;
          for (std::size_t r = 0; r < q.knowledge; ++r) c += q.at(r, j);
          return static_cast<double>(c);
        }(), 1e-15);
    }
  }
}

TEST(Marginals, SingleSchemaAndSingleKnowledge) {
  std::vector<std::size_t> k = {0, 1};
  std::vector<std::size_t> one = {0, 0};
  auto q = q_counts(k, 2, AssignmentMatrix::from_labels(one));
  KsMatrix r;
  r.knowledge = 2;
  r.schemas = 1;
  r.values = {0.3, 0.6};
  auto rk = knowledge_mastery(r, q);
  EXPECT_EQ(*rk[0], 0.3);
  EXPECT_EQ(*rk[1], 0.6);

  std::vector<std::size_t> k0 = {0, 0};
  std::vector<std::size_t> two = {0, 1};
  auto q2 = q_counts(k0, 1, AssignmentMatrix::from_labels(two));
  KsMatrix r2;
  r2.knowledge = 1;
  r2.schemas = 2;
  r2.values = {0.25, 0.75};
  auto rs = schema_mastery(r2, q2);
  EXPECT_EQ(*rs[0], 0.25);
  EXPECT_EQ(*rs[1], 0.75);
}

TEST(KsMatrix, EntriesAreProbabilitiesAndMatchNextStepPrediction) {
  Heg heg = tiny_heg();
  nn::HgktModel<float> m(tiny_model(), heg, 4);
  std::vector<InteractionEvent> hist = {{0, 0, 1, 0}, {0, 3, 0, 1}, {0, 4, 1, 2}};
  auto r = ks_matrix(m, hist);
  EXPECT_EQ(r.knowledge, 2u);
  EXPECT_EQ(r.schemas, 3u);
  EXPECT_EQ(r.t, 3u);
  for (double v : r.values) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  // Exercise 2 has knowledge 0 and schema 1, so predict_next on it is cell (0, 1).
  auto emb = m.encode_schemas();
  auto cur = m.start(1);
  std::mt19937_64 rng(1);
  for (const auto& e : hist) {
    std::vector<std::size_t> ex = {e.exercise};
    std::vector<std::uint8_t> c = {e.correct};
    m.observe(cur, ex, c, emb, false, rng);
  }
  std::vector<std::size_t> next = {2};
  auto p = m.predict_next(cur, next, emb, false, rng);
  EXPECT_NEAR(r.at(0, 1), p.item(), 1e-6);

  auto traj = mastery_trajectory(m, hist);
  ASSERT_EQ(traj.size(), hist.size());
  EXPECT_EQ(traj.back().values, r.values);
}

TEST(Report, JsonAndCsvLayout) {
  auto q = hand_q();
  auto r = hand_r();
  r.t = 5;
  r.learner_id = "L7";
  std::vector<std::string> kids = {"k0", "k1"};
  std::vector<std::string> sids = {"s0", "s1"};
  auto j = diagnosis_json(r, q, kids, sids);
  EXPECT_EQ(j.at("learner_id"), "L7");
  EXPECT_EQ(j.at("t"), 5);
  EXPECT_NEAR(j.at("R_k").at("k1").get<double>(), 0.5, 1e-12);
  EXPECT_EQ(j.at("R_ks").size(), 2u);

  const auto dir = hgkt::testing::scratch_dir("ks");
  write_ks_csv(dir / "ks.csv", r, kids, sids);
  std::ifstream in(dir / "ks.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "knowledge_id,s0,s1");
}
