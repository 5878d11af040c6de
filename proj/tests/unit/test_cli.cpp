#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using hgkt::cli::kExitOk;
using hgkt::cli::kExitRuntime;
using hgkt::cli::kExitValidation;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result hgkt_run(std::vector<std::string> args) {
  args.insert(args.begin(), "hgkt");
  std::ostringstream out, err;
  Result r;
  r.code = hgkt::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// One simulated dataset and trained checkpoint shared by the tests below.
class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = hgkt::testing::scratch_dir("cli");
    write(dir_ / "sim.json", R"({"n_learners": 40, "n_exercises": 12, "n_knowledge": 3, "n_true_schemas": 4,
                                 "seq_len": 10, "embed_dim": 8})");
    write(dir_ / "train.json", R"({"epochs": 1, "hidden": 8, "input_dim": 8, "exer_dim": 8, "schema_dim": 4,
                                   "window": 3, "gnn_layers": "B-1_T-1"})");
    ASSERT_EQ(hgkt_run({"simulate", "--config", s("sim.json"), "--out", s("sim")}).code, kExitOk);
    ASSERT_EQ(hgkt_run({"split", "--exercises", s("sim/exercises.jsonl"), "--logs", s("sim/logs.jsonl"),
                        "--train-out", s("data/train.jsonl"), "--test-out", s("data/test.jsonl")})
                  .code,
              kExitOk);
    ASSERT_EQ(hgkt_run({"build-heg", "--exercises", s("sim/exercises.jsonl"), "--logs", s("data/train.jsonl"),
                        "--embeddings", s("sim/embeddings.bin"), "--target-ratio", "2", "--lambda", "1.5", "--out",
                        s("heg/heg.json")})
                  .code,
              kExitOk);
    ASSERT_EQ(hgkt_run({"train", "--heg", s("heg/heg.json"), "--logs", s("data/train.jsonl"), "--config",
                        s("train.json"), "--out", s("ckpt")})
                  .code,
              kExitOk);
  }

  static std::string s(const std::string& rel) { return (dir_ / rel).string(); }
  static fs::path dir_;
};

fs::path CliPipeline::dir_;

}  // namespace

TEST(Cli, UnknownFlagIsValidationError) {
  auto r = hgkt_run({"train", "--bogus"});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, HelpSucceedsAndNoSubcommandFails) {
  EXPECT_EQ(hgkt_run({"--help"}).code, kExitOk);
  EXPECT_EQ(hgkt_run({}).code, kExitValidation);
  EXPECT_EQ(hgkt_run({"frobnicate"}).code, kExitValidation);
  EXPECT_NE(hgkt::cli::version().find("v0.1.0"), std::string::npos);
}

TEST(Cli, MissingInputIsValidationError) {
  auto dir = hgkt::testing::scratch_dir("cli_missing");
  auto r = hgkt_run({"simulate", "--config", (dir / "nope.json").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, kExitValidation);
}

TEST(Cli, UnknownConfigKeyIsValidationError) {
  auto dir = hgkt::testing::scratch_dir("cli_badcfg");
  write(dir / "sim.json", R"({"n_learner": 5})");
  EXPECT_EQ(hgkt_run({"simulate", "--config", (dir / "sim.json").string(), "--out", (dir / "o").string()}).code,
            kExitValidation);
}

TEST_F(CliPipeline, OmegaAndTargetRatioAreExclusive) {
  auto r = hgkt_run({"build-heg", "--exercises", s("sim/exercises.jsonl"), "--logs", s("data/train.jsonl"),
                     "--omega", "0.1", "--target-ratio", "3", "--out", s("x.json")});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_FALSE(fs::exists(dir_ / "x.json"));
}

TEST_F(CliPipeline, EveryOutputDirectoryHasManifest) {
  for (auto d : {"sim", "data", "heg", "ckpt"}) {
    ASSERT_TRUE(fs::exists(dir_ / d / "run_manifest.json")) << d;
    auto m = nlohmann::json::parse(slurp(dir_ / d / "run_manifest.json"));
    ASSERT_TRUE(m.contains("runs"));
    for (const auto& [cmd, run] : m.at("runs").items()) {
      EXPECT_TRUE(run.contains("version"));
      EXPECT_TRUE(run.contains("inputs"));
      EXPECT_TRUE(run.contains("config"));
      EXPECT_TRUE(run.contains("seed"));
      EXPECT_TRUE(run.contains("wall_seconds"));
    }
  }
  auto train_log = slurp(dir_ / "ckpt" / "train.log");
  EXPECT_EQ(train_log.substr(0, train_log.find('\n')), "epoch,loss,wall_ms,validation_auc");
}

TEST_F(CliPipeline, EvalDiagnoseSummarize) {
  auto e = hgkt_run({"eval", "--ckpt", s("ckpt"), "--logs", s("data/test.jsonl"), "--out", s("eval/metrics.csv")});
  ASSERT_EQ(e.code, kExitOk) << e.err;
  auto csv = slurp(dir_ / "eval" / "metrics.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "run_id,preset,seed,auc,acc,mae,rmse,n");

  std::ifstream test_logs(dir_ / "data" / "test.jsonl");
  std::string first;
  std::getline(test_logs, first);
  const auto learner = nlohmann::json::parse(first).at("learner_id").get<std::string>();
  auto d = hgkt_run({"diagnose", "--ckpt", s("ckpt"), "--logs", s("data/test.jsonl"), "--learner", learner, "--t",
                     "3", "--out", s("diag/d.json"), "--csv", s("diag/ks.csv")});
  ASSERT_EQ(d.code, kExitOk) << d.err;
  auto j = nlohmann::json::parse(slurp(dir_ / "diag" / "d.json"));
  EXPECT_EQ(j.at("t"), 3);
  EXPECT_EQ(j.at("knowledge_ids").size(), j.at("R_ks").size());
  EXPECT_EQ(j.at("schema_ids").size(), j.at("R_ks")[0].size());
  EXPECT_EQ(hgkt_run({"diagnose", "--ckpt", s("ckpt"), "--logs", s("data/test.jsonl"), "--learner", "nobody",
                      "--out", s("diag/n.json")})
                .code,
            kExitValidation);

  auto m = hgkt_run({"summarize", "--heg", s("heg/heg.json"), "--exercises", s("sim/exercises.jsonl"), "--out",
                     s("heg/schemas.json")});
  ASSERT_EQ(m.code, kExitOk) << m.err;
  auto schemas = nlohmann::json::parse(slurp(dir_ / "heg" / "schemas.json"));
  ASSERT_TRUE(schemas.is_array());
  ASSERT_FALSE(schemas.empty());
  EXPECT_TRUE(schemas[0].contains("description"));
}

TEST_F(CliPipeline, MismatchedGraphIsRuntimeError) {
  auto other = hgkt::testing::scratch_dir("cli_other");
  write(other / "sim.json", R"({"n_learners": 10, "n_exercises": 7, "n_knowledge": 2, "n_true_schemas": 3,
                                "seq_len": 5, "embed_dim": 4})");
  ASSERT_EQ(hgkt_run({"simulate", "--config", (other / "sim.json").string(), "--out", (other / "sim").string()}).code,
            kExitOk);
  ASSERT_EQ(hgkt_run({"build-heg", "--exercises", (other / "sim/exercises.jsonl").string(), "--logs",
                      (other / "sim/logs.jsonl").string(), "--out", (other / "heg.json").string()})
                .code,
            kExitOk);
  auto r = hgkt_run({"eval", "--ckpt", s("ckpt"), "--logs", s("data/test.jsonl"), "--heg",
                     (other / "heg.json").string(), "--out", s("eval/bad.csv")});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_FALSE(r.err.empty());
  auto m = hgkt_run({"summarize", "--heg", (other / "heg.json").string(), "--exercises", s("sim/exercises.jsonl"),
                     "--out", s("heg/bad.json")});
  EXPECT_EQ(m.code, kExitRuntime);
}

TEST_F(CliPipeline, RerunIsIdempotentAndInputsUntouched) {
  const auto logs_before = slurp(dir_ / "data" / "train.jsonl");
  const auto heg_before = slurp(dir_ / "heg" / "heg.json");
  ASSERT_EQ(hgkt_run({"build-heg", "--exercises", s("sim/exercises.jsonl"), "--logs", s("data/train.jsonl"),
                      "--embeddings", s("sim/embeddings.bin"), "--target-ratio", "2", "--lambda", "1.5", "--out",
                      s("heg2/heg.json")})
                .code,
            kExitOk);
  EXPECT_EQ(slurp(dir_ / "heg2" / "heg.json"), heg_before);
  EXPECT_EQ(slurp(dir_ / "data" / "train.jsonl"), logs_before);
}

TEST_F(CliPipeline, SweepWritesTables) {
  auto r = hgkt_run({"sweep", "--axis", "window", "--values", "2,3", "--config", s("train.json"), "--exercises",
                     s("sim/exercises.jsonl"), "--logs", s("sim/logs.jsonl"), "--embeddings", s("sim/embeddings.bin"),
                     "--out", s("sweep")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto table = slurp(dir_ / "sweep" / "sweep.csv");
  std::size_t lines = 0;
  for (char c : table) lines += c == '\n';
  EXPECT_EQ(lines, 3u);
  EXPECT_TRUE(fs::exists(dir_ / "sweep" / "summary.csv"));
  EXPECT_EQ(hgkt_run({"sweep", "--axis", "depth", "--values", "1", "--config", s("train.json"), "--exercises",
                      s("sim/exercises.jsonl"), "--logs", s("sim/logs.jsonl"), "--out", s("sweep_bad")})
                .code,
            kExitValidation);
}

TEST_F(CliPipeline, BadThreadCountIsValidationError) {
  setenv("HGKT_THREADS", "zero", 1);
  auto r = hgkt_run({"sweep", "--axis", "window", "--values", "2", "--config", s("train.json"), "--exercises",
                     s("sim/exercises.jsonl"), "--logs", s("sim/logs.jsonl"), "--out", s("sweep_threads")});
  unsetenv("HGKT_THREADS");
  EXPECT_EQ(r.code, kExitValidation);
}
