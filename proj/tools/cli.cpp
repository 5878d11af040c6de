#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "hgkt/checkpoint.hpp"
#include "hgkt/diagnosis.hpp"
#include "hgkt/errors.hpp"
#include "hgkt/pipeline.hpp"

#ifndef HGKT_VERSION
#define HGKT_VERSION "unknown"
#endif

namespace hgkt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version() { return HGKT_VERSION; }

namespace {

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

/// Digest of every regular file below `dir`, keyed by relative path.
json digest_tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() != "run_manifest.json")
      files[fs::relative(entry.path(), dir).generic_string()] = sha256_file(entry.path());
  }
  return files;
}

std::size_t thread_count() {
  const char* v = std::getenv("HGKT_THREADS");
  if (!v || !*v) return 1;
  std::size_t pos = 0;
  unsigned long n = 0;
  try {
    n = std::stoul(v, &pos);
  } catch (const std::logic_error&) {
    pos = 0;
  }
  if (pos != std::string_view(v).size() || n == 0) throw ValidationError("HGKT_THREADS must be a positive integer");
  return n;
}

std::string utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Provenance record; each artifact directory holds one run_manifest.json
/// with an entry per command that wrote into it.
class Manifest {
 public:
  explicit Manifest(std::string command)
      : command_(std::move(command)), started_(utc_now()), start_(std::chrono::steady_clock::now()) {}

  void input(const fs::path& path) {
    inputs_[path.string()] = fs::is_directory(path) ? digest_tree(path) : json(sha256_file(path));
  }
  void output(const fs::path& path) { outputs_.push_back(path.string()); }
  void config(json doc) { config_ = std::move(doc); }
  void seed(std::uint64_t s) { seed_ = s; }

  void write(const fs::path& dir, const std::string& key) const {
    fs::create_directories(dir);
    const fs::path file = dir / "run_manifest.json";
    json doc = json::object();
    if (std::ifstream in(file); in) {
      try {
        in >> doc;
      } catch (const json::exception&) {
        doc = json::object();
      }
      if (!doc.is_object()) doc = json::object();
    }
    json entry = {{"command", command_},
                  {"version", version()},
                  {"config", config_},
                  {"inputs", inputs_},
                  {"outputs", outputs_},
                  {"threads", thread_count()},
                  {"started_utc", started_},
                  {"wall_seconds",
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count()}};
    entry["seed"] = seed_ ? json(*seed_) : json(nullptr);
    doc["runs"][key] = std::move(entry);
    std::ofstream(file) << doc.dump(2) << '\n';
  }

 private:
  std::string command_;
  std::string started_;
  std::chrono::steady_clock::time_point start_;
  json config_ = json::object();
  json inputs_ = json::object();
  std::vector<std::string> outputs_;
  std::optional<std::uint64_t> seed_;
};

fs::path parent_dir(const fs::path& file) {
  fs::path p = file.parent_path();
  return p.empty() ? fs::path(".") : p;
}

void ensure_parent(const fs::path& file) {
  fs::path p = file.parent_path();
  if (!p.empty()) fs::create_directories(p);
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

EmbeddingTable corpus_embeddings(const ExerciseCorpus& corpus, const std::optional<fs::path>& file,
                                 std::uint64_t seed) {
  return file ? align_embeddings(read_embeddings(*file), corpus) : fallback_embed(corpus, 64, seed);
}

std::vector<std::string> schema_ids(std::size_t count) {
  std::vector<std::string> ids;
  for (std::size_t j = 0; j < count; ++j) ids.push_back("s" + std::to_string(j));
  return ids;
}

std::string run_label(const ModelConfig& model, std::uint64_t seed) {
  return preset_label(model.preset, model.attention) + "/seed=" + std::to_string(seed);
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  fs::path out;
};

int simulate(const SimulateArgs& a, std::ostream& out) {
  Manifest m("simulate");
  SimConfig sc;
  if (a.config) {
    sc = load_sim_config(*a.config);
    m.input(*a.config);
  }
  if (a.seed) sc.seed = *a.seed;
  sc.validate();
  SimulatedData data = generate(sc);
  write_simulation(a.out, data);
  for (const char* f : {"exercises.jsonl", "logs.jsonl", "embeddings.bin", "ground_truth.json"}) m.output(a.out / f);
  m.config(sim_config_to_json(sc));
  m.seed(sc.seed);
  m.write(a.out, "simulate");
  out << "simulated " << data.log.learner_ids.size() << " learners, " << data.corpus.exercise_count()
      << " exercises, " << data.log.event_count << " events -> " << a.out.string() << '\n';
  return kExitOk;
}

// ---- split -----------------------------------------------------------------

struct SplitArgs {
  fs::path exercises, logs, train_out, test_out;
  double ratio = 0.8;
  std::uint64_t seed = 1;
};

int split(const SplitArgs& a, std::ostream& out) {
  Manifest m("split");
  m.input(a.exercises);
  m.input(a.logs);
  ExerciseCorpus corpus = ExerciseCorpus::load(a.exercises);
  InteractionLog log = load_logs(a.logs, corpus);
  auto [train, test] = split_sequences(log.sequences, a.ratio, a.seed);
  ensure_parent(a.train_out);
  ensure_parent(a.test_out);
  save_logs(a.train_out, train, log.learner_ids, corpus);
  save_logs(a.test_out, test, log.learner_ids, corpus);
  m.output(a.train_out);
  m.output(a.test_out);
  m.config({{"ratio", a.ratio}});
  m.seed(a.seed);
  m.write(parent_dir(a.train_out), "split");
  if (fs::absolute(parent_dir(a.test_out)) != fs::absolute(parent_dir(a.train_out)))
    m.write(parent_dir(a.test_out), "split");
  out << "split " << log.sequences.size() << " learners: " << train.size() << " train, " << test.size()
      << " test\n";
  return kExitOk;
}

// ---- build-heg -------------------------------------------------------------

struct BuildHegArgs {
  fs::path exercises, logs, out;
  std::optional<fs::path> embeddings;
  std::string method = "support";
  std::optional<double> omega;
  double target_ratio = 3.5;
  double lambda = 4.0;
  double lambda_p = kDefaultLambdaP;
  std::size_t top_k = 2;
  std::uint64_t seed = 1;
};

int build_heg_cmd(const BuildHegArgs& a, std::ostream& out) {
  Manifest m("build-heg");
  m.input(a.exercises);
  m.input(a.logs);
  if (a.embeddings) m.input(*a.embeddings);
  HegOptions o;
  o.method = parse_graph_method(a.method);
  o.omega = a.omega;
  o.target_ratio = a.target_ratio;
  o.lambda = a.lambda;
  o.lambda_p = a.lambda_p;
  o.summary_top_k = a.top_k;
  if (o.target_ratio < 0 || o.lambda < 0 || o.lambda_p <= 0 || (o.omega && *o.omega < 0))
    throw ValidationError("build-heg: thresholds must be non-negative and lambda-p positive");

  ExerciseCorpus corpus = ExerciseCorpus::load(a.exercises);
  InteractionLog log = load_logs(a.logs, corpus);
  EmbeddingTable emb = corpus_embeddings(corpus, a.embeddings, a.seed);
  Heg heg = build_heg(corpus, emb, log.sequences, o);
  ensure_parent(a.out);
  save_heg(a.out, heg);
  m.output(a.out);
  json cfg = {{"method", a.method}, {"target_ratio", a.target_ratio}, {"lambda", a.lambda},
              {"lambda_p", a.lambda_p}, {"top_k", a.top_k}, {"embeddings", a.embeddings ? "file" : "fallback"}};
  cfg["omega"] = a.omega ? json(*a.omega) : json(nullptr);
  m.config(cfg);
  m.seed(a.seed);
  m.write(parent_dir(a.out), "build-heg:" + a.out.filename().string());
  out << "graph: " << heg.exercise_count() << " nodes, " << heg.graph.edge_count() << " edges (omega "
      << heg.graph.omega << "); " << heg.schema_count() << " schemas at lambda " << a.lambda << '\n';
  return kExitOk;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  fs::path heg, logs, out;
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
};

int train_cmd(const TrainArgs& a, std::ostream& out) {
  Manifest m("train");
  m.input(a.heg);
  m.input(a.logs);
  TrainConfig cfg;
  if (a.config) {
    cfg = load_train_config(*a.config);
    m.input(*a.config);
  }
  if (a.seed) cfg.seed = *a.seed;
  cfg.validate();
  Heg heg = load_heg(a.heg);
  InteractionLog log = load_logs(a.logs, heg.corpus());

  fs::create_directories(a.out);
  std::ofstream train_log(a.out / "train.log");
  train_log << "epoch,loss,wall_ms,validation_auc\n";
  train_log.precision(10);
  TrainResult result = train(cfg, heg, log.sequences, [&](const EpochStats& e) {
    train_log << e.epoch << ',' << e.loss << ',' << e.wall_ms << ',';
    if (e.validation_auc) train_log << *e.validation_auc;
    train_log << '\n' << std::flush;
    out << "epoch " << e.epoch << " loss " << e.loss;
    if (e.validation_auc) out << " val_auc " << *e.validation_auc;
    out << '\n';
  });
  save_checkpoint(a.out, *result.model, train_config_to_json(cfg));
  for (const char* f : {"manifest.json", "params.bin", "heg.json", "train.log"}) m.output(a.out / f);
  json cfg_doc = train_config_to_json(cfg);
  cfg_doc["best_epoch"] = result.best_epoch;
  cfg_doc["epochs_run"] = result.epochs.size();
  cfg_doc["early_stopped"] = result.early_stopped;
  m.config(cfg_doc);
  m.seed(cfg.seed);
  m.write(a.out, "train");
  out << "checkpoint (epoch " << result.best_epoch << ") -> " << a.out.string() << '\n';
  return kExitOk;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  fs::path ckpt, logs, out;
  std::optional<fs::path> heg;
  std::size_t batch_size = 32;
};

TrainConfig stored_train_config(const json& manifest) {
  const auto& c = manifest.at("config");
  auto it = c.find("train");
  return it != c.end() && it->is_object() && !it->empty() ? train_config_from_json(*it) : TrainConfig{};
}

int eval_cmd(const EvalArgs& a, std::ostream& out) {
  Manifest m("eval");
  m.input(a.ckpt);
  m.input(a.logs);
  std::optional<Heg> heg;
  if (a.heg) {
    m.input(*a.heg);
    heg = load_heg(*a.heg);
  }
  if (a.batch_size == 0) throw ValidationError("--batch-size must be positive");
  LoadedCheckpoint ck = load_checkpoint(a.ckpt, heg ? &*heg : nullptr);
  const TrainConfig cfg = stored_train_config(ck.manifest);
  InteractionLog log = load_logs(a.logs, ck.model->heg().corpus());
  Evaluation ev = evaluate(*ck.model, log.sequences, a.batch_size, cfg.limits());

  RunRecord r;
  r.run_id = run_label(ck.model->config(), cfg.seed);
  r.preset = preset_label(ck.model->config().preset, ck.model->config().attention);
  r.seed = cfg.seed;
  r.metrics = ev.metrics;
  ensure_parent(a.out);
  write_metrics_csv(a.out, std::span<const RunRecord>(&r, 1));
  m.output(a.out);
  m.config({{"batch_size", a.batch_size}, {"min_length", cfg.min_length}, {"max_length", cfg.max_length}});
  m.seed(cfg.seed);
  m.write(parent_dir(a.out), "eval:" + a.out.filename().string());
  out << "auc " << ev.metrics.auc << " acc " << ev.metrics.acc << " mae " << ev.metrics.mae << " rmse "
      << ev.metrics.rmse << " n " << ev.metrics.n << '\n';
  return kExitOk;
}

// ---- diagnose --------------------------------------------------------------

struct DiagnoseArgs {
  fs::path ckpt, logs, out;
  std::string learner;
  std::optional<std::size_t> t;
  std::optional<fs::path> csv;
};

int diagnose_cmd(const DiagnoseArgs& a, std::ostream& out) {
  Manifest m("diagnose");
  m.input(a.ckpt);
  m.input(a.logs);
  LoadedCheckpoint ck = load_checkpoint(a.ckpt);
  const Heg& heg = ck.model->heg();
  InteractionLog log = load_logs(a.logs, heg.corpus());
  auto learner = log.learner_ids.find(a.learner);
  if (!learner) throw ValidationError("learner \"" + a.learner + "\" not found in " + a.logs.string());
  const LearnerSequence* seq = nullptr;
  for (const auto& s : log.sequences)
    if (s.learner == *learner) seq = &s;
  const std::size_t len = seq->events.size();
  const std::size_t t = a.t.value_or(len);
  if (t == 0 || t > len)
    throw ValidationError("--t must lie in [1, " + std::to_string(len) + "] for learner " + a.learner);

  KsMatrix ks = ks_matrix(*ck.model, std::span<const InteractionEvent>(seq->events.data(), t));
  ks.learner_id = a.learner;
  const auto sids = schema_ids(heg.schema_count());
  json doc = diagnosis_json(ks, q_counts(heg), heg.knowledge_ids, sids);
  ensure_parent(a.out);
  std::ofstream(a.out) << doc.dump(2) << '\n';
  m.output(a.out);
  if (a.csv) {
    ensure_parent(*a.csv);
    write_ks_csv(*a.csv, ks, heg.knowledge_ids, sids);
    m.output(*a.csv);
  }
  m.config({{"learner", a.learner}, {"t", t}});
  m.write(parent_dir(a.out), "diagnose:" + a.out.filename().string());
  out << "diagnosis for " << a.learner << " after " << t << " events -> " << a.out.string() << '\n';
  return kExitOk;
}

// ---- summarize -------------------------------------------------------------

struct SummarizeArgs {
  fs::path heg, exercises, out;
  std::size_t top_k = 2;
};

int summarize_cmd(const SummarizeArgs& a, std::ostream& out) {
  Manifest m("summarize");
  m.input(a.heg);
  m.input(a.exercises);
  Heg heg = load_heg(a.heg);
  ExerciseCorpus corpus = ExerciseCorpus::load(a.exercises);
  if (!heg.matches(corpus)) throw DimensionError("summarize: exercise file does not match the graph's nodes");
  if (!corpus.has_all_text()) throw ValidationError("summarize: every exercise needs a text field");
  json doc = json::array();
  for (const auto& d : summarize_schemas(corpus, heg.assignment, a.top_k)) {
    doc.push_back({{"schema_id", "s" + std::to_string(d.schema_id)},
                   {"size", heg.assignment.members(d.schema_id).size()},
                   {"condition_keyphrases", d.condition_keyphrases},
                   {"objective_keyphrases", d.objective_keyphrases},
                   {"description", d.description}});
  }
  ensure_parent(a.out);
  std::ofstream(a.out) << doc.dump(2) << '\n';
  m.output(a.out);
  m.config({{"top_k", a.top_k}});
  m.write(parent_dir(a.out), "summarize:" + a.out.filename().string());
  out << doc.size() << " schema descriptions -> " << a.out.string() << '\n';
  return kExitOk;
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
  std::string axis;
  std::optional<std::string> values;
  std::optional<fs::path> config, sim, exercises, logs, embeddings;
  fs::path out;
};

int sweep_cmd(const SweepArgs& a, std::ostream& out) {
  Manifest m("sweep");
  const SweepAxis axis = parse_sweep_axis(a.axis);
  std::vector<std::string> values;
  if (a.values) {
    values = split_csv(*a.values);
  } else if (axis == SweepAxis::gnn_layers) {
    values = default_layer_grid();
  }
  if (values.empty()) throw ValidationError("sweep: --values is required for axis " + a.axis);

  TrainConfig base;
  if (a.config) {
    base = load_train_config(*a.config);
    m.input(*a.config);
  }
  base.validate();
  std::vector<TrainConfig> cells;
  for (const auto& v : values) cells.push_back(apply_axis(base, axis, v));

  const bool from_files = a.exercises || a.logs;
  if (from_files == static_cast<bool>(a.sim))
    throw ValidationError("sweep: give either --sim or both --exercises and --logs");
  if (from_files && !(a.exercises && a.logs)) throw ValidationError("sweep: --exercises and --logs go together");
  std::optional<SimConfig> sim_cfg;
  if (a.sim) {
    sim_cfg = load_sim_config(*a.sim);
    m.input(*a.sim);
  } else {
    m.input(*a.exercises);
    m.input(*a.logs);
    if (a.embeddings) m.input(*a.embeddings);
  }

  const auto seeds = base.seed_set();
  std::vector<Dataset> data;
  for (std::uint64_t seed : seeds) {
    if (sim_cfg) {
      SimConfig sc = *sim_cfg;
      sc.seed = seed;
      data.push_back(dataset_from_simulation(generate(sc), base.split_ratio, seed));
    } else {
      data.push_back(load_dataset(*a.exercises, *a.logs, a.embeddings, base.split_ratio, seed));
    }
  }

  struct Job {
    std::size_t value, seed;
  };
  std::vector<Job> jobs;
  for (std::size_t v = 0; v < values.size(); ++v)
    for (std::size_t s = 0; s < seeds.size(); ++s) jobs.push_back({v, s});
  std::vector<RunRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex io;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) {
      try {
        TrainConfig c = cells[jobs[k].value];
        c.seed = seeds[jobs[k].seed];
        records[k] = run_experiment(c, data[jobs[k].seed],
                                    a.axis + "=" + values[jobs[k].value] + "/seed=" + std::to_string(c.seed));
        std::lock_guard lock(io);
        out << records[k].run_id << " auc " << records[k].metrics.auc << '\n';
      } catch (...) {
        std::lock_guard lock(io);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const std::size_t threads = std::min(thread_count(), jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  fs::create_directories(a.out);
  {
    std::ofstream csv(a.out / "sweep.csv");
    csv.precision(10);
    csv << "axis,value,run_id,preset,seed,auc,acc,mae,rmse,n,schema_count,omega,epochs\n";
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      const auto& r = records[k];
      csv << a.axis << ',' << values[jobs[k].value] << ',' << r.run_id << ',' << r.preset << ',' << r.seed << ','
          << r.metrics.auc << ',' << r.metrics.acc << ',' << r.metrics.mae << ',' << r.metrics.rmse << ','
          << r.metrics.n << ',' << r.schema_count << ',' << r.omega << ',' << r.epochs.size() << '\n';
    }
  }
  {
    std::ofstream csv(a.out / "summary.csv");
    csv.precision(10);
    csv << "axis,value,runs,auc_mean,auc_sd,acc_mean,acc_sd,mae_mean,mae_sd,rmse_mean,rmse_sd\n";
    for (std::size_t v = 0; v < values.size(); ++v) {
      std::vector<Metrics> runs;
      for (std::size_t k = 0; k < jobs.size(); ++k)
        if (jobs[k].value == v) runs.push_back(records[k].metrics);
      auto rep = MetricsReport::aggregate(runs);
      csv << a.axis << ',' << values[v] << ',' << runs.size() << ',' << rep.mean.auc << ',' << rep.sd.auc << ','
          << rep.mean.acc << ',' << rep.sd.acc << ',' << rep.mean.mae << ',' << rep.sd.mae << ',' << rep.mean.rmse
          << ',' << rep.sd.rmse << '\n';
    }
  }
  m.output(a.out / "sweep.csv");
  m.output(a.out / "summary.csv");
  json cfg = train_config_to_json(base);
  cfg["axis"] = a.axis;
  cfg["values"] = values;
  m.config(cfg);
  m.write(a.out, "sweep");
  return kExitOk;
}

int dispatch_errors(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DimensionError& e) {
    err << "dimension error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Knowledge tracing over a hierarchical exercise graph.", "hgkt"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());
  app.footer("Exit codes: 0 success, 1 invalid input or flags, 2 runtime failure.\n"
             "HGKT_THREADS caps worker threads for sweep (default 1).");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Generate a synthetic corpus, logs, embeddings and ground truth");
  c_sim->add_option("--config", sim.config, "Simulation config JSON (defaults when omitted)")->check(CLI::ExistingFile);
  c_sim->add_option("--seed", sim.seed, "Override the config seed");
  c_sim->add_option("--out", sim.out, "Output directory")->required();

  SplitArgs sp;
  auto* c_split = app.add_subcommand("split", "Learner-level train/test split of a log file");
  c_split->add_option("--exercises", sp.exercises, "exercises.jsonl")->required()->check(CLI::ExistingFile);
  c_split->add_option("--logs", sp.logs, "logs.jsonl")->required()->check(CLI::ExistingFile);
  c_split->add_option("--ratio", sp.ratio, "Share of learners in the training side")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  c_split->add_option("--seed", sp.seed, "Shuffle seed")->capture_default_str();
  c_split->add_option("--train-out", sp.train_out, "Training logs output")->required();
  c_split->add_option("--test-out", sp.test_out, "Test logs output")->required();

  BuildHegArgs bh;
  auto* c_heg = app.add_subcommand("build-heg", "Build the direct support graph and the schema assignment");
  c_heg->add_option("--exercises", bh.exercises, "exercises.jsonl")->required()->check(CLI::ExistingFile);
  c_heg->add_option("--logs", bh.logs, "Training logs (support counts)")->required()->check(CLI::ExistingFile);
  c_heg->add_option("--embeddings", bh.embeddings, "HGKTEMB1 embedding file (fallback embedder when omitted)")
      ->check(CLI::ExistingFile);
  c_heg->add_option("--method", bh.method, "Graph method")
      ->capture_default_str()
      ->check(CLI::IsMember({"knowledge", "bertsim", "transition", "support"}));
  auto* o_omega = c_heg->add_option("--omega", bh.omega, "Edge threshold");
  auto* o_ratio =
      c_heg->add_option("--target-ratio", bh.target_ratio, "Pick omega for this edge-to-node ratio")->capture_default_str();
  o_omega->excludes(o_ratio);
  c_heg->add_option("--lambda", bh.lambda, "Clustering cut threshold")->capture_default_str();
  c_heg->add_option("--lambda-p", bh.lambda_p, "Smoothing constant of the support estimate")->capture_default_str();
  c_heg->add_option("--top-k", bh.top_k, "Keyphrases per schema part")->capture_default_str();
  c_heg->add_option("--seed", bh.seed, "Seed of the fallback embedder")->capture_default_str();
  c_heg->add_option("--out", bh.out, "heg.json output")->required();

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train encoder and tracer end to end; writes a checkpoint");
  c_train->add_option("--heg", tr.heg, "heg.json")->required()->check(CLI::ExistingFile);
  c_train->add_option("--logs", tr.logs, "Training logs")->required()->check(CLI::ExistingFile);
  c_train->add_option("--config", tr.config, "Training config JSON (defaults when omitted)")->check(CLI::ExistingFile);
  c_train->add_option("--seed", tr.seed, "Override the config seed");
  c_train->add_option("--out", tr.out, "Checkpoint directory")->required();

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Next-step prediction metrics on a log file");
  c_eval->add_option("--ckpt", ev.ckpt, "Checkpoint directory")->required()->check(CLI::ExistingDirectory);
  c_eval->add_option("--logs", ev.logs, "Test logs")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--heg", ev.heg, "Replace the checkpoint's graph (dimensions must agree)")
      ->check(CLI::ExistingFile);
  c_eval->add_option("--batch-size", ev.batch_size, "Evaluation batch size")->capture_default_str();
  c_eval->add_option("--out", ev.out, "metrics.csv output")->required();

  DiagnoseArgs dg;
  auto* c_diag = app.add_subcommand("diagnose", "Knowledge and schema mastery of one learner");
  c_diag->add_option("--ckpt", dg.ckpt, "Checkpoint directory")->required()->check(CLI::ExistingDirectory);
  c_diag->add_option("--logs", dg.logs, "Logs holding the learner's history")->required()->check(CLI::ExistingFile);
  c_diag->add_option("--learner", dg.learner, "Learner id")->required();
  c_diag->add_option("--t", dg.t, "Number of events to replay (default: all)");
  c_diag->add_option("--csv", dg.csv, "Also write the knowledge x schema matrix as CSV");
  c_diag->add_option("--out", dg.out, "diagnosis.json output")->required();

  SummarizeArgs sm;
  auto* c_sum = app.add_subcommand("summarize", "Keyphrase descriptions of every schema");
  c_sum->add_option("--heg", sm.heg, "heg.json")->required()->check(CLI::ExistingFile);
  c_sum->add_option("--exercises", sm.exercises, "exercises.jsonl with text")->required()->check(CLI::ExistingFile);
  c_sum->add_option("--top-k", sm.top_k, "Keyphrases per schema part")->capture_default_str();
  c_sum->add_option("--out", sm.out, "schemas.json output")->required();

  SweepArgs sw;
  auto* c_sweep = app.add_subcommand("sweep", "Train and evaluate once per (value, seed)");
  c_sweep->add_option("--axis", sw.axis, "Swept field")
      ->required()
      ->check(CLI::IsMember({"omega", "lambda", "window", "gnn_layers"}));
  c_sweep->add_option("--values", sw.values, "Comma-separated values (gnn_layers defaults to the 8-cell grid)");
  c_sweep->add_option("--config", sw.config, "Base training config JSON; its seeds form the seed set")
      ->check(CLI::ExistingFile);
  c_sweep->add_option("--sim", sw.sim, "Simulation config; data regenerated per seed")->check(CLI::ExistingFile);
  c_sweep->add_option("--exercises", sw.exercises, "exercises.jsonl")->check(CLI::ExistingFile);
  c_sweep->add_option("--logs", sw.logs, "logs.jsonl, split per seed")->check(CLI::ExistingFile);
  c_sweep->add_option("--embeddings", sw.embeddings, "HGKTEMB1 embedding file")->check(CLI::ExistingFile);
  c_sweep->add_option("--out", sw.out, "Output directory")->required();

  std::vector<char*> argv;
  std::vector<std::string> storage(args);
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return kExitValidation;
  }

  return dispatch_errors(
      [&]() -> int {
        if (c_sim->parsed()) return simulate(sim, out);
        if (c_split->parsed()) return split(sp, out);
        if (c_heg->parsed()) return build_heg_cmd(bh, out);
        if (c_train->parsed()) return train_cmd(tr, out);
        if (c_eval->parsed()) return eval_cmd(ev, out);
        if (c_diag->parsed()) return diagnose_cmd(dg, out);
        if (c_sum->parsed()) return summarize_cmd(sm, out);
        if (c_sweep->parsed()) return sweep_cmd(sw, out);
        return kExitValidation;
      },
      err);
}

}  // namespace hgkt::cli
