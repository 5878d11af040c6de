// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "hgkt/diagnosis.hpp"
#include "hgkt/grad_check.hpp"
#include "hgkt/hgnn.hpp"
#include "hgkt/metrics.hpp"
#include "hgkt/pipeline.hpp"
#include "hgkt/schema_cluster.hpp"
#include "hgkt/seq_model.hpp"
#include "hgkt/simgen.hpp"
#include "hgkt/support_graph.hpp"
#include "support/oracles.hpp"

using namespace hgkt;
using namespace hgkt::nn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome support_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::size_t mismatched_counts = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng() % 5;
    auto log = testing::random_toy_log(rng, n, 10, 8);
    auto c = count_ordered_pairs(log, n);
    auto brute = testing::brute_counts(log, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) mismatched_counts += c(i, j, a, b) != brute.get(i, j, a, b);
        worst = std::max(worst, std::abs(support_value(c, i, j) - testing::brute_support(brute, i, j, kDefaultLambdaP)));
      }
  }
  const double secs = seconds_since(t0);
  return {mismatched_counts == 0 && worst <= 1e-12 && secs < 10.0,
          fmt("100 logs, count mismatches %zu, max value error %.2e, %.2fs", mismatched_counts, worst, secs)};
}

Outcome gradient_check() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t min_coords = SIZE_MAX, kinks = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimConfig sc;
    sc.n_learners = 6;
    sc.n_exercises = 12;
    sc.n_knowledge = 3;
    sc.n_true_schemas = 4;
    sc.seq_len = 8;
    sc.seed = seed;
    auto sim = generate(sc);
    std::vector<LearnerSequence> seqs(sim.log.sequences.begin(), sim.log.sequences.end());
    AssignmentMatrix am;
    am.assign = sim.truth.schema_of;
    am.schema_count = 4;
    Heg heg = make_heg(sim.corpus, build_knowledge_graph(sim.corpus), am);
    ModelConfig mc;
    mc.hidden = 16;
    mc.window = 3;
    mc.dropout = 0.0;
    nn::HgktModel<double> model(mc, heg, seed);
    auto params = model.parameter_tensors();
    std::mt19937_64 r(seed + 100);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (auto& p : params)
      for (auto& v : p.mutable_values()) v = u(r);
    auto batch = Batch::from(std::span<const LearnerSequence>(seqs));
    auto lossf = [&] {
      std::mt19937_64 rng(1);
      return model.loss(model.forward(batch, false, rng));
    };
    auto rep = nn::grad_check(lossf, params);
    worst = std::max(worst, rep.max_relative_error);
    kinks += rep.kinks;
    for (std::size_t t = 0; t < params.size(); ++t) {
      const std::size_t want = std::min<std::size_t>(50, params[t].size());
      if (rep.per_tensor[t] < want) return {false, fmt("tensor %zu checked %zu < %zu", t, rep.per_tensor[t], want)};
      min_coords = std::min(min_coords, rep.per_tensor[t]);
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-3 && secs < 120.0,
          fmt("5 models, max relative error %.2e, min coordinates per tensor %zu, %zu kinks skipped, %.1fs", worst,
              min_coords, kinks, secs)};
}

Outcome pooling_identity() {
  using T = Tensor<double>;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 2.0);
  bool same = true;
  for (std::size_t n : {1u, 5u, 17u, 50u}) {
    std::vector<double> a(n * n), h(n * 7), s(n * n, 0.0);
    for (auto& x : a) x = g(rng);
    for (auto& x : h) x = g(rng);
    for (std::size_t i = 0; i < n; ++i) s[i * n + i] = 1.0;
    auto p = pool(T::constant({n, n}, a), T::constant({n, 7}, h), T::constant({n, n}, s));
    same = same && std::equal(a.begin(), a.end(), p.adjacency.values().begin()) &&
           std::equal(h.begin(), h.end(), p.features.values().begin());
  }
  return {same, same ? "bitwise identical for n in {1,5,17,50}" : "pooled output differs"};
}

Outcome normalization() {
  using T = Tensor<double>;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 3.0);
  double alpha_err = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t s = 1 + rng() % 12, w = 1 + rng() % 8;
    std::vector<double> mem(s * w), sn(w), mc(s);
    for (auto& x : mem) x = g(rng);
    for (auto& x : sn) x = g(rng);
    for (auto& x : mc) x = std::abs(g(rng));
    auto a = schema_attention(T::constant({s, w}, mem), T::constant({1, w}, sn), T::constant({1, s}, mc));
    double sum = 0.0;
    for (double v : a.alpha.values()) sum += v;
    alpha_err = std::max(alpha_err, std::abs(sum - 1.0));
  }

  bool exact = true;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng() % 40, k = 1 + rng() % 6;
    std::vector<std::size_t> kn(n), sc(n);
    for (auto& x : kn) x = rng() % k;
    for (auto& x : sc) x = rng() % 8;
    auto q = q_counts(kn, k, AssignmentMatrix::from_labels(sc));
    auto dk = knowledge_weights(q);
    auto ds = schema_weights(q);
    for (std::size_t i = 0; i < q.knowledge; ++i) {
      double row = 0.0;
      std::size_t nz = 0;
      for (std::size_t j = 0; j < q.schemas; ++j) row += dk[i * q.schemas + j], nz += q.at(i, j);
      if (nz > 0 && row != 1.0) exact = false;
    }
    for (std::size_t j = 0; j < q.schemas; ++j) {
      double col = 0.0;
      std::size_t nz = 0;
      for (std::size_t i = 0; i < q.knowledge; ++i) col += ds[i * q.schemas + j], nz += q.at(i, j);
      if (nz > 0 && col != 1.0) exact = false;
    }
  }

  std::vector<std::size_t> hk = {0, 0, 1, 1};
  std::vector<std::size_t> hs = {0, 0, 0, 1};
  auto hq = q_counts(hk, 2, AssignmentMatrix::from_labels(hs));
  KsMatrix r;
  r.knowledge = 2;
  r.schemas = 2;
  r.values = {0.8, 0.2, 0.6, 0.4};
  auto rk = knowledge_mastery(r, hq);
  auto rs = schema_mastery(r, hq);
  const double hand_err = std::max({std::abs(*rk[0] - 0.8), std::abs(*rk[1] - 0.5),
                                    std::abs(*rs[0] - 2.2 / 3.0), std::abs(*rs[1] - 0.4)});
  return {alpha_err <= 1e-6 && exact && hand_err <= 1e-9,
          fmt("alpha max |sum-1| %.1e over 1000 inputs, weight sums exact: %s, hand example error %.1e "
              "(R_k=[%.4f,%.4f], R_s=[%.4f,%.4f])",
              alpha_err, exact ? "yes" : "no", hand_err, *rk[0], *rk[1], *rs[0], *rs[1])};
}

struct AblationResult {
  std::map<std::string, double> mean_auc;
  double ceiling = 0.0;
  double seconds = 0.0;
};

const AblationResult& ablation() {
  static const AblationResult result = [] {
    AblationResult out;
    const auto t0 = Clock::now();
    const std::vector<std::pair<SchemaPreset, bool>> presets = {{SchemaPreset::none, false},
                                                                {SchemaPreset::direct_only, false},
                                                                {SchemaPreset::indirect_only, false},
                                                                {SchemaPreset::both, false},
                                                                {SchemaPreset::both, true}};
    const int seeds = 5;
    for (int seed = 1; seed <= seeds; ++seed) {
      SimConfig sc;
      sc.seed = seed;
      auto data = dataset_from_simulation(generate(sc), 0.8, seed);
      out.ceiling += bayes_ceiling(*data.truth, data.test, data.learner_ids, data.corpus.exercise_ids()).metrics.auc / seeds;
      for (auto [preset, att] : presets) {
        TrainConfig tc;
        tc.epochs = 30;
        tc.seed = seed;
        tc.validation_fraction = 0.1;
        tc.patience = 4;
        tc.gnn_layers = GnnLayout::parse("B-1_T-1");
        tc.ablation_preset = preset;
        tc.attention = att;
        Heg heg = build_heg(data.corpus, data.embeddings, data.train, heg_options(tc));
        auto trained = train(tc, heg, data.train);
        out.mean_auc[preset_label(preset, att)] += evaluate(*trained.model, data.test).metrics.auc / seeds;
      }
    }
    out.seconds = seconds_since(t0);
    return out;
  }();
  return result;
}

Outcome synthetic_uplift() {
  const auto& r = ablation();
  const double full = r.mean_auc.at("both+attention"), none = r.mean_auc.at("none");
  return {full - none >= 0.02 && full <= r.ceiling + 0.01 && r.seconds < 900.0,
          fmt("full %.4f, none %.4f, uplift %.4f, ceiling %.4f, 25 runs in %.0fs", full, none, full - none,
              r.ceiling, r.seconds)};
}

Outcome ablation_ordering() {
  const auto& m = ablation().mean_auc;
  const double tie = 0.005;
  const double att = m.at("both+attention"), both = m.at("both"), direct = m.at("direct_only"),
               indirect = m.at("indirect_only"), none = m.at("none");
  const double best_single = std::max(direct, indirect);
  const bool ok = att + tie >= both && both + tie >= best_single && best_single + tie >= none;
  return {ok, fmt("both+attention %.4f, both %.4f, direct_only %.4f, indirect_only %.4f, none %.4f (tie %.3f)",
                  att, both, direct, indirect, none, tie)};
}

Outcome loss_descent() {
  SimConfig sc;
  sc.n_learners = 200;
  sc.n_exercises = 12;
  sc.n_knowledge = 3;
  sc.n_true_schemas = 4;
  sc.seq_len = 30;
  sc.ability_sd = sc.schema_ability_sd = sc.difficulty_sd = 4.0;
  sc.seed = 1;
  auto data = dataset_from_simulation(generate(sc), 0.8, 1);
  TrainConfig tc;
  tc.epochs = 20;
  tc.patience = 20;
  Heg heg = build_heg(data.corpus, data.embeddings, data.train, heg_options(tc));
  auto r = train(tc, heg, data.train);
  const double first = r.epochs.front().loss, last = r.epochs.back().loss;
  return {r.epochs.size() == 20 && last <= 0.7 * first,
          fmt("epoch 1 loss %.4f, epoch %zu loss %.4f, ratio %.3f", first, r.epochs.size(), last, last / first)};
}

Outcome window_contract() {
  using T = Tensor<double>;
  const std::size_t window = 20, length = 45, s_dim = 10, width = 6;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  auto random_row = [&](std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return T::constant({1, n}, v);
  };
  std::vector<HistoryEntry<double>> hist;
  for (std::size_t t = 0; t < length; ++t) hist.push_back({random_row(s_dim), random_row(width)});
  const auto s_next = random_row(width);
  const auto base = seq_attention<double>(hist, s_next, window, s_dim);
  std::size_t changed = 0;
  for (int rep = 0; rep < 100; ++rep) {
    auto perturbed = hist;
    const std::size_t pos = rng() % (length - window);
    perturbed[pos] = {random_row(s_dim), random_row(width)};
    auto after = seq_attention<double>(perturbed, s_next, window, s_dim);
    changed += !std::equal(base.values().begin(), base.values().end(), after.values().begin());
  }
  // The model keeps no more than the window in its buffer.
  HistoryBuffer<double> buf(window);
  for (std::size_t t = 0; t < length; ++t) buf.push(hist[t]);
  const bool buffer_ok = buf.size() == window && std::ranges::equal(buf.entries().front().m_cur.values(), hist[length - window].m_cur.values());
  return {changed == 0 && buffer_ok,
          fmt("100 perturbations older than %zu steps, %zu changed m_att; buffer holds %zu", window, changed, buf.size())};
}

Outcome clustering() {
  SimConfig sc;
  sc.seed = 5;
  auto d = generate(sc);
  auto dendro = agglomerative_cluster(d.embeddings);
  std::size_t prev = SIZE_MAX;
  bool monotone = true;
  std::string counts;
  for (int i = 0; i < 10; ++i) {
    const double lambda = 0.5 + 0.75 * i;
    const std::size_t s = cut_threshold(dendro, lambda).schema_count;
    monotone = monotone && s <= prev;
    prev = s;
    counts += (counts.empty() ? "" : ",") + std::to_string(s);
  }
  sc.noise_sigma = 0.0;
  auto clean = generate(sc);
  auto cut = cut_threshold(agglomerative_cluster(clean.embeddings), 1e-6);
  const double ari = adjusted_rand_index(cut.assign, clean.truth.schema_of);
  return {monotone && ari == 1.0, fmt("|S| over lambda 0.5..7.25: %s; zero-noise ARI %.6f", counts.c_str(), ari)};
}

Outcome auc_oracle() {
  std::mt19937_64 rng(10);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + rng() % 1999;
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = rep % 2 ? static_cast<double>(rng() % 50) / 50.0 : std::uniform_real_distribution<double>(0, 1)(rng);
      y[i] = static_cast<std::uint8_t>(rng() % 2);
    }
    worst = std::max(worst, std::abs(auc_score(s, y) - testing::brute_auc(s, y)));
  }
  return {worst <= 1e-9, fmt("20 vectors, max |auc - pairwise| %.2e", worst)};
}

Outcome summarizer() {
  const auto& t = testing::triangle_texts();
  std::vector<std::string> texts(t.begin(), t.end());
  auto d = summarize_schema(0, texts);
  auto has = [](const std::vector<std::string>& v, auto pred) { return std::any_of(v.begin(), v.end(), pred); };
  const bool circ = has(d.condition_keyphrases, [](const std::string& s) { return s == "circumference"; });
  const bool ratio = has(d.condition_keyphrases, [](const std::string& s) { return s.find("ratio") != std::string::npos; });
  const bool shortest =
      has(d.objective_keyphrases, [](const std::string& s) { return s.find("shortest side") != std::string::npos; });
  return {circ && ratio && shortest, "\"" + d.description + "\""};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hgkt");
  std::ostringstream out, err;
  const int code = hgkt::cli::run(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

Outcome determinism() {
  const auto root = testing::scratch_dir("acceptance_determinism");
  std::ofstream(root / "sim.json") << R"({"n_learners": 80, "n_exercises": 16, "n_knowledge": 4, "n_true_schemas": 4,
                                          "seq_len": 15, "embed_dim": 8, "seed": 7})";
  std::ofstream(root / "train.json") << R"({"epochs": 3, "hidden": 16, "input_dim": 16, "exer_dim": 8,
                                            "schema_dim": 6, "window": 5, "seed": 7})";
  for (auto run : {"a", "b"}) {
    const auto d = root / run;
    auto p = [&](const std::string& rel) { return (d / rel).string(); };
    int rc = cli({"simulate", "--config", (root / "sim.json").string(), "--out", p("sim")});
    rc = rc ? rc : cli({"split", "--exercises", p("sim/exercises.jsonl"), "--logs", p("sim/logs.jsonl"), "--seed", "7",
                        "--train-out", p("data/train.jsonl"), "--test-out", p("data/test.jsonl")});
    rc = rc ? rc : cli({"build-heg", "--exercises", p("sim/exercises.jsonl"), "--logs", p("data/train.jsonl"),
                        "--embeddings", p("sim/embeddings.bin"), "--out", p("heg/heg.json")});
    rc = rc ? rc : cli({"train", "--heg", p("heg/heg.json"), "--logs", p("data/train.jsonl"), "--config",
                        (root / "train.json").string(), "--out", p("ckpt")});
    rc = rc ? rc : cli({"eval", "--ckpt", p("ckpt"), "--logs", p("data/test.jsonl"), "--out", p("eval/metrics.csv")});
    if (rc != 0) return {false, fmt("pipeline run %s exited with %d", run, rc)};
  }
  std::size_t differ = 0;
  std::string listed;
  for (auto rel : {"heg/heg.json", "ckpt/params.bin", "ckpt/manifest.json", "ckpt/heg.json", "eval/metrics.csv"}) {
    const auto a = slurp(root / "a" / rel), b = slurp(root / "b" / rel);
    if (a.empty() || a != b) ++differ;
    listed += std::string(listed.empty() ? "" : ", ") + rel;
  }
  return {differ == 0, fmt("%zu of 5 artifacts differ (%s)", differ, listed.c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"support counts and values match brute force", support_oracle},
      {"end-to-end gradient check", gradient_check},
      {"pooling with identity assignment", pooling_identity},
      {"attention and diagnosis normalization", normalization},
      {"synthetic uplift over knowledge-only baseline", synthetic_uplift},
      {"ablation ordering", ablation_ordering},
      {"training loss descent", loss_descent},
      {"sequence attention window", window_contract},
      {"clustering monotonicity and exact recovery", clustering},
      {"AUC matches pairwise brute force", auc_oracle},
      {"schema summarizer keyphrases", summarizer},
      {"CLI pipeline determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
