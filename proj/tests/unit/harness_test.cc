// Copyright 2026 The LH-IQN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <unistd.h>

#include <gtest/gtest.h>

#include "lhiqn/agent/learner.h"
#include "lhiqn/env/environment.h"
#include "lhiqn/errors.h"
#include "lhiqn/harness/checkpoint.h"
#include "lhiqn/harness/config.h"
#include "lhiqn/harness/experiment.h"
#include "lhiqn/harness/metrics.h"
#include "lhiqn/rng.h"
#include "meeting_oracle.h"

namespace lhiqn::harness {
namespace {

namespace fs = std::filesystem;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() /
                       ("lhiqn_harness_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// A small LH-IRQN run that finishes in a few seconds.
ExperimentConfig Tiny(const fs::path& out) {
  ExperimentConfig c;
  c.agent.trunk = {16};
  c.agent.lstm_cells = 16;
  c.agent.embedding_n = 16;
  c.agent.head = {16};
  c.agent.n = c.agent.n_prime = c.agent.m = c.agent.m_prime = c.agent.k = 8;
  c.agent.batch_size = 8;
  c.agent.target_period = 50;
  c.agent.epsilon.steps = 1000;
  c.run.total_steps = 1000;
  c.run.eval_period = 250;
  c.run.eval_episodes = 3;
  c.run.final_eval_episodes = 5;
  c.run.warmup_steps = 200;
  c.run.train_period = 2;
  c.run.replay_capacity = 100;
  c.run.output_dir = out.string();
  return c;
}

// Config.

TEST(ConfigTest, MissingKeysKeepDefaults) {
  const ExperimentConfig c = ParseConfig("[agent]\nbeta = 0.5\n");
  EXPECT_EQ(c.agent.beta, 0.5);
  EXPECT_EQ(c.agent.gamma, ExperimentConfig{}.agent.gamma);
  EXPECT_EQ(c.env.grid_size, 4);
  EXPECT_EQ(c.run.seeds, (std::vector<std::uint64_t>{1}));
}

TEST(ConfigTest, DumpParsesBackToSameConfig) {
  ExperimentConfig c;
  c.env.grid_size = 5;
  c.env.flicker = 0.25;
  c.agent.variant.algorithm = agent::Algorithm::kHDqn;
  c.agent.variant.recurrent = false;
  c.agent.distortion = dist::DistortionKind::kWang;
  c.agent.trunk = {8, 4};
  c.agent.eta_mode = agent::EtaMode::kLinear;
  c.agent.eta.end = 0.05;
  c.run.seeds = {3, 9, 11};
  c.run.total_steps = 12345;
  c.run.eval_period = 100;
  c.run.wall_clock = true;
  const std::string text = DumpConfig(c);
  const ExperimentConfig back = ParseConfig(text);
  EXPECT_EQ(DumpConfig(back), text);
  EXPECT_EQ(back.agent.trunk, c.agent.trunk);
  EXPECT_EQ(back.run.seeds, c.run.seeds);
  EXPECT_EQ(back.agent.variant.algorithm, agent::Algorithm::kHDqn);
  EXPECT_EQ(back.agent.eta.end, 0.05);
}

TEST(ConfigTest, ShippedPresetsParse) {
  for (const auto& entry : fs::directory_iterator(LHIQN_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    SCOPED_TRACE(entry.path().string());
    const ExperimentConfig c = LoadConfig(entry.path().string());
    EXPECT_NO_THROW(c.Validate());
  }
}

TEST(ConfigTest, Errors) {
  EXPECT_THROW(ParseConfig("[agent]\nbetta = 0.5\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[agents]\nbeta = 0.5\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[agent]\nbeta = high\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[agent]\nalgorithm = sarsa\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[run]\ntotal_steps = 100\neval_period = 200\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[run]\nseeds =\n"), ConfigError);
  EXPECT_THROW(ParseConfig("[env]\ngrid_size = 0\n"), ConfigError);
  EXPECT_THROW(LoadConfig("/nonexistent/lhiqn.ini"), ConfigError);
}

// Metrics.

TEST(MetricsTest, EmptyCellsReadAsNaN) {
  const fs::path dir = TempDir("cells");
  const std::string path = (dir / "m.csv").string();
  {
    MetricsWriter w(path);
    MetricsRow row;
    row.step = 10;
    row.eval_return = 0.5;
    w.Write(row);
  }
  const std::string text = ReadFile(path);
  EXPECT_EQ(text.rfind(kMetricsVersion, 0), 0u);
  const MetricsTable t = ReadMetrics(path);
  EXPECT_EQ(t.columns, MetricsColumns());
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.Column("eval_return")[0], 0.5);
  EXPECT_TRUE(std::isnan(t.Column("tdl_mean")[0]));
  EXPECT_TRUE(std::isnan(t.Column("train_return")[0]));
  EXPECT_THROW(t.Column("loss"), InputError);
  fs::remove_all(dir);
}

TEST(MetricsTest, ErrorMarkerFlagsTable) {
  const fs::path dir = TempDir("marker");
  const std::string path = (dir / "m.csv").string();
  {
    MetricsWriter w(path);
    MetricsRow row;
    row.step = 5;
    w.Write(row);
    w.WriteError(7, 3, "loss is not finite");
  }
  const MetricsTable t = ReadMetrics(path);
  EXPECT_TRUE(t.failed);
  EXPECT_NE(t.error.find("loss is not finite"), std::string::npos);
  EXPECT_EQ(t.rows.size(), 1u);
  fs::remove_all(dir);
}

TEST(MetricsTest, MalformedFiles) {
  const fs::path dir = TempDir("malformed");
  const std::string path = (dir / "m.csv").string();
  WriteFile(path, std::string(kMetricsVersion) + "\nstep,eval_return\n1,2,3\n");
  EXPECT_THROW(ReadMetrics(path), InputError);
  WriteFile(path, std::string(kMetricsVersion) + "\nstep,eval_return\n1,abc\n");
  EXPECT_THROW(ReadMetrics(path), InputError);
  EXPECT_THROW(ReadMetrics((dir / "missing.csv").string()), InputError);
  fs::remove_all(dir);
}

// Aggregation.

std::string Csv(const std::vector<std::pair<long, double>>& rows) {
  std::string s = std::string(kMetricsVersion) + "\nstep,eval_return\n";
  for (const auto& [step, v] : rows) s += std::to_string(step) + "," + std::to_string(v) + "\n";
  return s;
}

const SummaryRow& Find(const std::vector<SummaryRow>& rows, long step, const std::string& metric) {
  for (const SummaryRow& r : rows) {
    if (r.step == step && r.metric == metric) return r;
  }
  throw std::runtime_error("no row");
}

TEST(AggregateTest, SingleFileHasZeroSpread) {
  const fs::path dir = TempDir("agg1");
  const std::string a = (dir / "a.csv").string();
  WriteFile(a, Csv({{100, 0.25}, {200, 0.75}}));
  const std::vector<std::string> paths = {a};
  const std::vector<SummaryRow> rows = Aggregate(paths);
  EXPECT_EQ(Find(rows, 100, "eval_return").mean, 0.25);
  EXPECT_EQ(Find(rows, 200, "eval_return").mean, 0.75);
  EXPECT_EQ(Find(rows, 200, "eval_return").stddev, 0.0);
  EXPECT_EQ(Find(rows, 200, "eval_return").count, 1);
  fs::remove_all(dir);
}

TEST(AggregateTest, PopulationStd) {
  const fs::path dir = TempDir("agg2");
  const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  WriteFile(a, Csv({{100, 0.0}}));
  WriteFile(b, Csv({{100, 1.0}}));
  const std::vector<std::string> paths = {a, b};
  const SummaryRow r = Find(Aggregate(paths), 100, "eval_return");
  EXPECT_EQ(r.mean, 0.5);
  EXPECT_EQ(r.stddev, 0.5);
  EXPECT_EQ(r.count, 2);
  fs::remove_all(dir);
}

TEST(AggregateTest, GridMismatchNamesFile) {
  const fs::path dir = TempDir("agg3");
  const std::string a = (dir / "a.csv").string(), b = (dir / "odd.csv").string();
  WriteFile(a, Csv({{100, 0.0}, {200, 0.0}}));
  WriteFile(b, Csv({{100, 0.0}, {300, 0.0}}));
  const std::vector<std::string> paths = {a, b};
  try {
    Aggregate(paths);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("odd.csv"), std::string::npos) << e.what();
  }
  WriteFile(b, std::string(kMetricsVersion) + "\nstep,train_return\n100,0\n200,0\n");
  EXPECT_THROW(Aggregate(paths), InputError);
  fs::remove_all(dir);
}

TEST(AggregateTest, PermutationInvariantAndSkipsFailedSeeds) {
  const fs::path dir = TempDir("agg4");
  std::vector<std::string> paths;
  const double values[] = {0.1, 0.7, 0.4, 0.9};
  for (int i = 0; i < 4; ++i) {
    paths.push_back((dir / ("s" + std::to_string(i) + ".csv")).string());
    WriteFile(paths.back(), Csv({{50, values[i]}, {100, values[i] * 2}}));
  }
  const std::string failed = (dir / "failed.csv").string();
  WriteFile(failed, Csv({{50, 100.0}}) + std::string(kErrorMarker) + " step=60 seed=9: boom\n");
  const std::vector<SummaryRow> base = Aggregate(paths);
  std::vector<std::string> shuffled = {paths[2], failed, paths[0], paths[3], paths[1]};
  const std::vector<SummaryRow> other = Aggregate(shuffled);
  ASSERT_EQ(base.size(), other.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    EXPECT_EQ(base[i].step, other[i].step);
    EXPECT_EQ(base[i].metric, other[i].metric);
    EXPECT_NEAR(base[i].mean, other[i].mean, 1e-15);
    EXPECT_NEAR(base[i].stddev, other[i].stddev, 1e-15);
    EXPECT_EQ(base[i].count, other[i].count);
  }
  EXPECT_NEAR(Find(other, 50, "eval_return").mean, 0.525, 1e-12);
  const std::vector<std::string> only_failed = {failed};
  EXPECT_THROW(Aggregate(only_failed), InputError);
  EXPECT_THROW(Aggregate(std::vector<std::string>{}), InputError);
  fs::remove_all(dir);
}

TEST(AggregateTest, SummaryFileFormat) {
  const fs::path dir = TempDir("agg5");
  const std::vector<SummaryRow> rows = {{100, "eval_return", 0.5, 0.25, 2}};
  const std::string path = (dir / "summary.csv").string();
  WriteSummary(path, rows);
  const std::string text = ReadFile(path);
  EXPECT_EQ(text.rfind(std::string(kSummaryVersion) + "\nstep,metric,mean,std,count\n", 0), 0u);
  EXPECT_NE(text.find("100,eval_return,0.5,0.25,2"), std::string::npos) << text;
  fs::remove_all(dir);
}

// Spearman.

TEST(SpearmanTest, Examples) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> up = {2, 4, 8, 16, 32};
  const std::vector<double> down = {5, 4, 3, 2, 1};
  EXPECT_NEAR(SpearmanCorrelation(x, up), 1.0, 1e-15);
  EXPECT_NEAR(SpearmanCorrelation(x, down), -1.0, 1e-15);
  // Ties get average ranks: y ranks (1, 2.5, 2.5, 4, 5). Pearson on ranks by
  // hand: cov 4.5, var_x 10, var_y 9.5.
  const std::vector<double> tied = {1, 3, 3, 7, 9};
  EXPECT_NEAR(SpearmanCorrelation(x, tied), 9.5 / std::sqrt(10.0 * 9.5), 1e-15);
  const std::vector<double> flat = {2, 2, 2, 2, 2};
  EXPECT_TRUE(std::isnan(SpearmanCorrelation(x, flat)));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> holes = {nan, 1, 2, nan, 3};
  EXPECT_NEAR(SpearmanCorrelation(x, holes), 1.0, 1e-15);
  const std::vector<double> one = {1};
  EXPECT_TRUE(std::isnan(SpearmanCorrelation(one, one)));
}

// Evaluation.

TEST(EvaluateTest, ZeroEpisodesIsAnError) {
  const env::EnvConfig c;
  const ScriptedPolicy stay = [](const env::Environment&, Rng&) {
    return JointAction{env::kStay, env::kStay};
  };
  EXPECT_THROW(EvaluatePolicy(c, 1, 0, stay), std::invalid_argument);
  std::vector<agent::Learner*> none;
  EXPECT_THROW(EvaluateLearners(none, c, 1, 1), std::invalid_argument);
}

TEST(EvaluateTest, RandomPolicyIsWellBelowOne) {
  const env::EnvConfig c;
  const ScriptedPolicy random = [](const env::Environment&, Rng& rng) {
    std::uniform_int_distribution<int> pick(0, env::kNumActions - 1);
    const int a = pick(rng);
    return JointAction{a, pick(rng)};
  };
  const EvalResult r = EvaluatePolicy(c, 3, 100, random);
  EXPECT_LT(r.mean_return, 0.5);
  EXPECT_GT(r.mean_length, 1.0);
}

TEST(EvaluateTest, OptimalScriptedPolicyOnNoiselessThreeByThree) {
  env::EnvConfig c;
  c.grid_size = 3;
  c.transition_noise = 0.0;
  c.flicker = 0.0;
  const testing::MeetingOracle oracle(3, c.episode_cap, 0.0, false);
  const EvalResult r = EvaluatePolicy(c, 8, 100, testing::OraclePolicy(oracle, 3, c.episode_cap));
  EXPECT_EQ(r.mean_return, 1.0);
}

TEST(EvaluateTest, LeavesTrainingStateUntouched) {
  ExperimentConfig c = Tiny(fs::temp_directory_path());
  const std::vector<int> shape = env::MakeEnvironment(c.env)->ObservationShape();
  auto make = [&] { return agent::MakeLearner(c.agent, shape, env::kNumActions, 5, 6); };
  std::unique_ptr<agent::Learner> a = make(), b = make();
  std::unique_ptr<agent::Learner> a2 = make(), b2 = make();
  std::vector<agent::Learner*> evaluated = {a.get(), b.get()};
  EvaluateLearners(evaluated, c.env, 9, 3);
  const std::vector<float> obs(env::MakeEnvironment(c.env)->observation_size(), 0.5f);
  const dist::DistortionOperator identity;
  Rng r1(4), r2(4);
  for (int t = 0; t < 20; ++t) {
    ASSERT_EQ(a->Act(agent::kTrainSlot, obs, 0.3, identity, r1),
              a2->Act(agent::kTrainSlot, obs, 0.3, identity, r2));
  }
  std::stringstream s1, s2;
  a->Save(s1);
  a2->Save(s2);
  EXPECT_EQ(s1.str(), s2.str());
}

// Runs.

TEST(RunTest, TwoSeedsWriteTwoCsvs) {
  const fs::path dir = TempDir("run");
  ExperimentConfig c = Tiny(dir);
  c.run.seeds = {1, 2};
  const std::vector<SeedResult> results = harness::Run(c);
  ASSERT_EQ(results.size(), 2u);
  for (const SeedResult& r : results) {
    ASSERT_TRUE(r.ok) << r.error;
    EXPECT_TRUE(fs::exists(r.csv_path));
    EXPECT_TRUE(fs::exists(r.checkpoint_path));
    const MetricsTable t = ReadMetrics(r.csv_path);
    EXPECT_EQ(t.columns, MetricsColumns());
    const std::vector<double> steps = t.Column("step");
    EXPECT_EQ(steps, (std::vector<double>{250, 500, 750, 1000}));
    for (double v : t.Column("tdl_mean")) EXPECT_FALSE(std::isnan(v));
    for (double u : t.Column("tdl_usage")) {
      EXPECT_GE(u, 0.0);
      EXPECT_LE(u, 1.0);
    }
    EXPECT_TRUE(std::isnan(t.Column("wall_seconds")[0]));
    EXPECT_EQ(t.Column("eval_return").back(), r.final_eval_return);
  }
  EXPECT_NE(ReadFile(results[0].csv_path), ReadFile(results[1].csv_path));
  fs::remove_all(dir);
}

TEST(RunTest, SameSeedIsByteIdentical) {
  const fs::path dir = TempDir("repeat");
  const ExperimentConfig c = Tiny(dir);
  const SeedResult first = RunSeed(c, 7);
  ASSERT_TRUE(first.ok) << first.error;
  const std::string csv = ReadFile(first.csv_path);
  const std::string checkpoint = ReadFile(first.checkpoint_path);
  const SeedResult second = RunSeed(c, 7);
  ASSERT_TRUE(second.ok) << second.error;
  EXPECT_EQ(ReadFile(second.csv_path), csv);
  EXPECT_TRUE(ReadFile(second.checkpoint_path) == checkpoint);
  fs::remove_all(dir);
}

TEST(RunTest, WorkersDoNotChangeResults) {
  const fs::path dir = TempDir("workers");
  ExperimentConfig c = Tiny(dir / "serial");
  c.run.total_steps = 500;
  c.run.seeds = {1, 2, 3};
  const std::vector<SeedResult> serial = harness::Run(c);
  c.run.workers = 3;
  c.run.output_dir = (dir / "parallel").string();
  const std::vector<SeedResult> parallel = harness::Run(c);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(ReadFile(serial[i].csv_path), ReadFile(parallel[i].csv_path));
  }
  fs::remove_all(dir);
}

TEST(RunTest, BaselineLeavesTdlCellsEmpty) {
  const fs::path dir = TempDir("baseline");
  ExperimentConfig c = Tiny(dir);
  c.agent.variant.algorithm = agent::Algorithm::kHDqn;
  c.run.total_steps = 500;
  const SeedResult r = RunSeed(c, 1);
  ASSERT_TRUE(r.ok) << r.error;
  const MetricsTable t = ReadMetrics(r.csv_path);
  for (double v : t.Column("tdl_mean")) EXPECT_TRUE(std::isnan(v));
  for (double v : t.Column("tdl_usage")) EXPECT_TRUE(std::isnan(v));
  fs::remove_all(dir);
}

TEST(RunTest, InvalidConfigIsRejected) {
  ExperimentConfig c = Tiny(fs::temp_directory_path());
  c.run.seeds.clear();
  EXPECT_THROW(harness::Run(c), ConfigError);
}

// Checkpoints.

TEST(CheckpointTest, RoundTrip) {
  const fs::path dir = TempDir("ckpt");
  ExperimentConfig c = Tiny(dir);
  c.run.total_steps = 500;
  const SeedResult r = RunSeed(c, 4);
  ASSERT_TRUE(r.ok) << r.error;
  const Checkpoint loaded = LoadCheckpoint(r.checkpoint_path);
  EXPECT_EQ(loaded.seed, 4u);
  EXPECT_EQ(DumpConfig(loaded.config), DumpConfig(c));
  ASSERT_EQ(loaded.learners.size(), 2u);

  const std::string copy = (dir / "copy.ckpt").string();
  std::vector<agent::Learner*> ptrs = {loaded.learners[0].get(), loaded.learners[1].get()};
  SaveCheckpoint(copy, loaded.config, loaded.seed, ptrs);
  EXPECT_EQ(ReadFile(copy), ReadFile(r.checkpoint_path));

  // The learners behave identically after a reload.
  const Checkpoint again = LoadCheckpoint(copy);
  std::vector<agent::Learner*> other = {again.learners[0].get(), again.learners[1].get()};
  const EvalResult e1 = EvaluateLearners(ptrs, c.env, 11, 5);
  const EvalResult e2 = EvaluateLearners(other, c.env, 11, 5);
  EXPECT_EQ(e1.mean_return, e2.mean_return);
  EXPECT_EQ(e1.mean_length, e2.mean_length);
  fs::remove_all(dir);
}

TEST(CheckpointTest, MalformedFiles) {
  const fs::path dir = TempDir("badckpt");
  const std::string path = (dir / "bad.ckpt").string();
  WriteFile(path, "not a checkpoint");
  EXPECT_THROW(LoadCheckpoint(path), InputError);
  EXPECT_THROW(LoadCheckpoint((dir / "missing.ckpt").string()), InputError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace lhiqn::harness
