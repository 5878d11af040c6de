#include "hgkt/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "hgkt/adam.hpp"
#include "hgkt/errors.hpp"

namespace hgkt {

ModelConfig TrainConfig::model() const {
  ModelConfig m;
  m.exer_dim = exer_dim;
  m.schema_dim = schema_dim;
  m.input_dim = input_dim;
  m.hidden = hidden;
  m.window = window;
  m.layout = gnn_layers;
  m.preset = ablation_preset;
  m.attention = attention;
  m.strict_eq14 = strict_eq14;
  m.normalize_beta = normalize_beta;
  m.mean_pool = mean_pool;
  m.dropout = dropout;
  return m;
}

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("train config: ") + what);
  };
  require(lr >= 0.0, "lr must be non-negative");
  require(batch_size > 0, "batch_size must be positive");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
  require(epochs > 0, "epochs must be positive");
  require(patience > 0, "patience must be positive");
  require(validation_fraction >= 0.0 && validation_fraction < 1.0, "validation_fraction must lie in [0, 1)");
  require(window > 0 && hidden > 0 && schema_dim > 0 && exer_dim > 0 && input_dim > 0, "sizes must be positive");
  require(!omega || *omega >= 0.0, "omega must be non-negative");
  require(target_ratio >= 0.0, "target_ratio must be non-negative");
  require(lambda >= 0.0, "lambda must be non-negative");
  require(lambda_p > 0.0, "lambda_p must be positive");
  require(split_ratio > 0.0 && split_ratio < 1.0, "split_ratio must lie in (0, 1)");
  require(min_length >= 2 && max_length >= min_length, "sequence limits must satisfy 2 <= min_length <= max_length");
}

TrainConfig train_config_from_json(const nlohmann::json& doc) {
  static const std::set<std::string> known = {
      "lr",         "batch_size", "dropout",   "epochs",        "patience",     "validation_fraction",     "seed",           "seeds",
      "window",     "hidden",     "schema_dim", "exer_dim",     "input_dim",    "gnn_layers",     "graph_method",
      "omega",      "target_ratio", "lambda",  "lambda_p",      "ablation_preset", "attention",   "strict_eq14",
      "normalize_beta", "mean_pool", "split_ratio", "min_length", "max_length"};
  if (!doc.is_object()) throw ValidationError("train config must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key)) throw ValidationError("train config: unknown key \"" + key + "\"");
  }
  TrainConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (doc.contains(key)) field = doc.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("lr", c.lr);
    get("batch_size", c.batch_size);
    get("dropout", c.dropout);
    get("epochs", c.epochs);
    get("patience", c.patience);
    get("validation_fraction", c.validation_fraction);
    get("seed", c.seed);
    get("seeds", c.seeds);
    get("window", c.window);
    get("hidden", c.hidden);
    get("schema_dim", c.schema_dim);
    get("exer_dim", c.exer_dim);
    get("input_dim", c.input_dim);
    if (doc.contains("gnn_layers")) c.gnn_layers = GnnLayout::parse(doc.at("gnn_layers").get<std::string>());
    if (doc.contains("graph_method")) c.graph_method = parse_graph_method(doc.at("graph_method").get<std::string>());
    if (doc.contains("omega") && !doc.at("omega").is_null()) c.omega = doc.at("omega").get<double>();
    get("target_ratio", c.target_ratio);
    get("lambda", c.lambda);
    get("lambda_p", c.lambda_p);
    if (doc.contains("ablation_preset")) {
      c.ablation_preset = parse_schema_preset(doc.at("ablation_preset").get<std::string>());
    }
    get("attention", c.attention);
    get("strict_eq14", c.strict_eq14);
    get("normalize_beta", c.normalize_beta);
    get("mean_pool", c.mean_pool);
    get("split_ratio", c.split_ratio);
    get("min_length", c.min_length);
    get("max_length", c.max_length);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("train config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json train_config_to_json(const TrainConfig& c) {
  return {{"lr", c.lr},
          {"batch_size", c.batch_size},
          {"dropout", c.dropout},
          {"epochs", c.epochs},
          {"patience", c.patience},
          {"validation_fraction", c.validation_fraction},
          {"seed", c.seed},
          {"seeds", c.seeds},
          {"window", c.window},
          {"hidden", c.hidden},
          {"schema_dim", c.schema_dim},
          {"exer_dim", c.exer_dim},
          {"input_dim", c.input_dim},
          {"gnn_layers", c.gnn_layers.str()},
          {"graph_method", std::string(to_string(c.graph_method))},
          {"omega", c.omega ? nlohmann::json(*c.omega) : nlohmann::json(nullptr)},
          {"target_ratio", c.target_ratio},
          {"lambda", c.lambda},
          {"lambda_p", c.lambda_p},
          {"ablation_preset", std::string(to_string(c.ablation_preset))},
          {"attention", c.attention},
          {"strict_eq14", c.strict_eq14},
          {"normalize_beta", c.normalize_beta},
          {"mean_pool", c.mean_pool},
          {"split_ratio", c.split_ratio},
          {"min_length", c.min_length},
          {"max_length", c.max_length}};
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return train_config_from_json(doc);
}

std::string preset_label(SchemaPreset preset, bool attention) {
  return std::string(to_string(preset)) + (attention ? "+attention" : "");
}

TrainResult train(const TrainConfig& config, const Heg& heg, std::span<const LearnerSequence> train_seqs,
                  const std::function<void(const EpochStats&)>& on_epoch) {
  config.validate();
  TrainResult result;
  result.model = std::make_unique<nn::HgktModel<float>>(config.model(), heg, config.seed);
  auto& model = *result.model;
  std::vector<LearnerSequence> seqs = prepare_sequences(train_seqs, config.limits());
  if (seqs.empty()) throw ValidationError("no training sequence reaches the minimum length");
  std::vector<LearnerSequence> held_out;
  if (config.validation_fraction > 0.0) {
    if (seqs.size() < 2) throw ValidationError("validation needs at least two training sequences");
    std::mt19937_64 split_rng(config.seed ^ 0xc2b2ae3d27d4eb4fULL);
    std::shuffle(seqs.begin(), seqs.end(), split_rng);
    const auto n = static_cast<double>(seqs.size());
    const std::size_t count = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(n * config.validation_fraction)), 1,
                                                      seqs.size() - 1);
    held_out.assign(std::make_move_iterator(seqs.end() - static_cast<std::ptrdiff_t>(count)),
                    std::make_move_iterator(seqs.end()));
    seqs.resize(seqs.size() - count);
  }

  auto params = model.parameter_tensors();
  nn::Adam<float> adam(params, {config.lr, 0.9, 0.999, 1e-8});
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(seqs.size());
  std::iota(order.begin(), order.end(), 0);

  double best = std::numeric_limits<double>::infinity();  // lower is better
  std::size_t since_best = 0;
  std::vector<std::vector<float>> best_values;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t targets = 0;
    for (std::size_t first = 0, batch_no = 0; first < order.size(); first += config.batch_size, ++batch_no) {
      const std::size_t last = std::min(order.size(), first + config.batch_size);
      std::vector<const LearnerSequence*> members;
      for (std::size_t k = first; k < last; ++k) members.push_back(&seqs[order[k]]);
      Batch batch = Batch::from(std::span<const LearnerSequence* const>(members));

      nn::Tape<float> tape;
      nn::TapeScope<float> scope(tape);
      auto out = model.forward(batch, true, rng);
      auto loss = model.loss(out);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_no));
      }
      adam.zero_grad();
      tape.backward(loss);
      adam.step();
      loss_sum += value * static_cast<double>(out.count);
      targets += out.count;
    }
    adam.zero_grad();
    EpochStats stats{epoch, loss_sum / static_cast<double>(std::max<std::size_t>(targets, 1)),
                     std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count(),
                     std::nullopt};
    double score = stats.loss;
    if (!held_out.empty()) {
      stats.validation_auc = evaluate(model, held_out, config.batch_size, config.limits()).metrics.auc;
      score = -*stats.validation_auc;
    }
    result.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
    if (score < best) {
      best = score;
      since_best = 0;
      result.best_epoch = epoch;
      if (!held_out.empty()) {
        best_values.clear();
        for (const auto& p : params) best_values.emplace_back(p.values().begin(), p.values().end());
      }
    } else if (++since_best >= config.patience) {
      result.early_stopped = epoch < config.epochs;
      break;
    }
  }
  if (held_out.empty()) {
    result.best_epoch = result.epochs.size();
  } else {
    for (std::size_t k = 0; k < params.size(); ++k) std::ranges::copy(best_values[k], params[k].mutable_values().begin());
  }
  return result;
}

Evaluation evaluate(const nn::HgktModel<float>& model, std::span<const LearnerSequence> test_seqs,
                    std::size_t batch_size, SequenceLimits limits) {
  if (batch_size == 0) throw ValidationError("batch size must be positive");
  const std::vector<LearnerSequence> seqs = prepare_sequences(test_seqs, limits);
  Evaluation ev;
  std::mt19937_64 rng(0);  // unused: no dropout at evaluation
  for (std::size_t first = 0; first < seqs.size(); first += batch_size) {
    const std::size_t last = std::min(seqs.size(), first + batch_size);
    Batch batch = Batch::from(std::span<const LearnerSequence>(seqs.data() + first, last - first));
    auto out = model.forward(batch, false, rng);
    auto preds = out.predictions.values();
    // regroup step-major output per learner so the pooled order is stable
    const std::size_t B = batch.size, steps = batch.steps - 1;
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t t = 0; t < steps; ++t) {
        const std::size_t k = t * B + b;
        if (out.mask[k] == 0.0f) continue;
        ev.scores.push_back(static_cast<double>(preds[k]));
        ev.labels.push_back(out.labels[k] != 0.0f ? 1 : 0);
      }
  }
  ev.metrics = compute_metrics(ev.scores, ev.labels);
  return ev;
}

}  // namespace hgkt
