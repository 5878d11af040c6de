#include "hgkt/pipeline.hpp"

#include <fstream>
#include <map>

#include "hgkt/errors.hpp"
#include "hgkt/schema_cluster.hpp"
#include "hgkt/support_graph.hpp"

namespace hgkt {

Dataset dataset_from_simulation(const SimulatedData& sim, double split_ratio, std::uint64_t split_seed) {
  Dataset d;
  d.corpus = sim.corpus;
  d.embeddings = align_embeddings(sim.embeddings, sim.corpus);
  d.learner_ids = sim.log.learner_ids;
  std::tie(d.train, d.test) = split_sequences(sim.log.sequences, split_ratio, split_seed);
  d.truth = sim.truth;
  return d;
}

Dataset load_dataset(const std::filesystem::path& exercises, const std::filesystem::path& logs,
                     const std::optional<std::filesystem::path>& embeddings, double split_ratio,
                     std::uint64_t split_seed, std::size_t fallback_dim) {
  Dataset d;
  d.corpus = ExerciseCorpus::load(exercises);
  InteractionLog log = load_logs(logs, d.corpus);
  d.learner_ids = log.learner_ids;
  d.embeddings = embeddings ? align_embeddings(read_embeddings(*embeddings), d.corpus)
                            : fallback_embed(d.corpus, fallback_dim, split_seed);
  std::tie(d.train, d.test) = split_sequences(log.sequences, split_ratio, split_seed);
  return d;
}

HegOptions heg_options(const TrainConfig& c) {
  HegOptions o;
  o.method = c.graph_method;
  o.omega = c.omega;
  o.target_ratio = c.target_ratio;
  o.lambda = c.lambda;
  o.lambda_p = c.lambda_p;
  return o;
}

Heg build_heg(const ExerciseCorpus& corpus, const EmbeddingTable& embeddings,
              std::span<const LearnerSequence> train_seqs, const HegOptions& options) {
  const std::size_t n = corpus.exercise_count();
  if (embeddings.size() != n) throw DimensionError("build_heg: embeddings do not cover the corpus");
  DirectSupportGraph graph;
  if (options.method == GraphMethod::knowledge) {
    graph = build_knowledge_graph(corpus);
  } else {
    std::vector<double> scores;
    switch (options.method) {
      case GraphMethod::support:
        scores = support_scores(count_ordered_pairs(train_seqs, n), options.lambda_p);
        break;
      case GraphMethod::bertsim:
        scores = bertsim_scores(embeddings);
        break;
      case GraphMethod::transition:
        scores = transition_scores(train_seqs, n);
        break;
      case GraphMethod::knowledge:
        break;
    }
    const double omega = options.omega ? *options.omega : select_omega(scores, n, options.target_ratio);
    graph = threshold_scores(std::move(scores), n, options.method, omega);
  }
  AssignmentMatrix assignment = n >= 2 ? cut_threshold(agglomerative_cluster(embeddings), options.lambda)
                                       : AssignmentMatrix::identity(n);
  assignment.lambda = options.lambda;
  Heg heg = make_heg(corpus, std::move(graph), std::move(assignment), options.lambda_p);
  if (corpus.has_all_text()) {
    for (const auto& d : summarize_schemas(corpus, heg.assignment, options.summary_top_k)) {
      heg.schema_descriptions.push_back(d.description);
    }
  }
  return heg;
}

RunRecord run_experiment(const TrainConfig& config, const Dataset& data, std::string run_id) {
  Heg heg = build_heg(data.corpus, data.embeddings, data.train, heg_options(config));
  TrainResult trained = train(config, heg, data.train);
  Evaluation ev = evaluate(*trained.model, data.test, config.batch_size, config.limits());
  RunRecord r;
  r.run_id = run_id.empty() ? preset_label(config.ablation_preset, config.attention) + "/seed=" +
                                  std::to_string(config.seed)
                            : std::move(run_id);
  r.preset = preset_label(config.ablation_preset, config.attention);
  r.seed = config.seed;
  r.metrics = ev.metrics;
  r.epochs = std::move(trained.epochs);
  r.schema_count = heg.schema_count();
  r.omega = heg.graph.omega;
  return r;
}

void write_metrics_csv(const std::filesystem::path& path, std::span<const RunRecord> runs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "run_id,preset,seed,auc,acc,mae,rmse,n\n";
  out.precision(10);
  for (const auto& r : runs) {
    out << r.run_id << ',' << r.preset << ',' << r.seed << ',' << r.metrics.auc << ',' << r.metrics.acc << ','
        << r.metrics.mae << ',' << r.metrics.rmse << ',' << r.metrics.n << '\n';
  }
}

SweepAxis parse_sweep_axis(std::string_view name) {
  for (auto a : {SweepAxis::omega, SweepAxis::lambda, SweepAxis::window, SweepAxis::gnn_layers}) {
    if (to_string(a) == name) return a;
  }
  throw ValidationError("unknown sweep axis \"" + std::string(name) + "\" (expected omega, lambda, window or gnn_layers)");
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::omega: return "omega";
    case SweepAxis::lambda: return "lambda";
    case SweepAxis::window: return "window";
    case SweepAxis::gnn_layers: return "gnn_layers";
  }
  return "omega";
}

TrainConfig apply_axis(TrainConfig config, SweepAxis axis, std::string_view value) {
  const std::string v(value);
  try {
    switch (axis) {
      case SweepAxis::omega:
        config.omega = std::stod(v);
        break;
      case SweepAxis::lambda:
        config.lambda = std::stod(v);
        break;
      case SweepAxis::window:
        config.window = std::stoul(v);
        break;
      case SweepAxis::gnn_layers:
        config.gnn_layers = GnnLayout::parse(v);
        break;
    }
  } catch (const std::logic_error&) {
    throw ValidationError("bad value \"" + v + "\" for sweep axis " + std::string(to_string(axis)));
  }
  config.validate();
  return config;
}

std::vector<std::string> default_layer_grid() {
  return {"B-1_T-1", "B-1_T-2", "B-1_T-3", "B-2_T-1", "B-2_T-2", "B-2_T-3", "B-3_T-1", "B-3_T-2"};
}

std::vector<RunRecord> sweep(SweepAxis axis, std::span<const std::string> values, const TrainConfig& base,
                             const std::function<Dataset(std::uint64_t seed)>& data_for_seed,
                             const std::function<void(const RunRecord&)>& on_run) {
  if (values.empty()) throw ValidationError("sweep needs at least one value");
  std::vector<TrainConfig> configs;
  for (const auto& v : values) configs.push_back(apply_axis(base, axis, v));
  std::vector<RunRecord> out;
  for (std::uint64_t seed : base.seed_set()) {
    const Dataset data = data_for_seed(seed);
    for (std::size_t i = 0; i < values.size(); ++i) {
      TrainConfig c = configs[i];
      c.seed = seed;
      out.push_back(run_experiment(c, data, std::string(to_string(axis)) + "=" + values[i] + "/seed=" +
                                                 std::to_string(seed)));
      if (on_run) on_run(out.back());
    }
  }
  return out;
}

}  // namespace hgkt
