#include <benchmark/benchmark.h>

#include <random>

#include "hgkt/metrics.hpp"
#include "hgkt/pipeline.hpp"
#include "hgkt/support_graph.hpp"
#include "hgkt/tensor.hpp"

namespace {

using namespace hgkt;

const SimulatedData& desk_sim() {
  static const SimulatedData sim = generate(SimConfig{});
  return sim;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  auto a = nn::Tensor<float>::constant({n, n}, nn::uniform_init<float>(n * n, n, rng));
  auto b = nn::Tensor<float>::constant({n, n}, nn::uniform_init<float>(n * n, n, rng));
  for (auto _ : state) benchmark::DoNotOptimize(nn::matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(200)->Arg(400);

void BM_CountOrderedPairs(benchmark::State& state) {
  const auto& sim = desk_sim();
  for (auto _ : state)
    benchmark::DoNotOptimize(count_ordered_pairs(sim.log.sequences, sim.corpus.exercise_count()));
}
BENCHMARK(BM_CountOrderedPairs);

void BM_BuildHeg(benchmark::State& state) {
  const auto& sim = desk_sim();
  auto data = dataset_from_simulation(sim, 0.8, 1);
  for (auto _ : state) benchmark::DoNotOptimize(build_heg(data.corpus, data.embeddings, data.train, {}));
}
BENCHMARK(BM_BuildHeg)->Unit(benchmark::kMillisecond);

void BM_SchemaEncoder(benchmark::State& state) {
  const auto& sim = desk_sim();
  auto data = dataset_from_simulation(sim, 0.8, 1);
  Heg heg = build_heg(data.corpus, data.embeddings, data.train, {});
  nn::HgktModel<float> model(ModelConfig{}, heg, 1);
  for (auto _ : state) benchmark::DoNotOptimize(model.encode_schemas());
}
BENCHMARK(BM_SchemaEncoder)->Unit(benchmark::kMicrosecond);

// One optimisation step on a 32-learner batch at default model sizes.
void BM_TrainBatch(benchmark::State& state) {
  const auto& sim = desk_sim();
  auto data = dataset_from_simulation(sim, 0.8, 1);
  Heg heg = build_heg(data.corpus, data.embeddings, data.train, {});
  nn::HgktModel<float> model(ModelConfig{}, heg, 1);
  auto batch = Batch::from(std::span<const LearnerSequence>(data.train.data(), 32));
  std::mt19937_64 rng(1);
  for (auto _ : state) {
    nn::Tape<float> tape;
    nn::TapeScope<float> scope(tape);
    auto loss = model.loss(model.forward(batch, true, rng));
    tape.backward(loss);
    for (auto& p : model.parameter_tensors()) p.zero_grad();
  }
}
BENCHMARK(BM_TrainBatch)->Unit(benchmark::kMillisecond);

void BM_Auc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u;
  std::vector<double> scores(n);
  std::vector<std::uint8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = u(rng);
    labels[i] = u(rng) < 0.5;
  }
  for (auto _ : state) benchmark::DoNotOptimize(auc_score(scores, labels));
}
BENCHMARK(BM_Auc)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
