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

// Command line front end: train, eval, aggregate, debug-env.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lhiqn/env/environment.h"
#include "lhiqn/errors.h"
#include "lhiqn/harness/checkpoint.h"
#include "lhiqn/harness/config.h"
#include "lhiqn/harness/experiment.h"
#include "lhiqn/harness/metrics.h"

namespace {

using namespace lhiqn;

int Train(const std::string& config_path, const std::vector<std::uint64_t>& seeds,
          const std::string& out, long steps, int workers) {
  harness::ExperimentConfig config = harness::LoadConfig(config_path);
  if (!seeds.empty()) config.run.seeds = seeds;
  if (!out.empty()) config.run.output_dir = out;
  if (steps > 0) {
    config.run.total_steps = steps;
    config.run.eval_period = std::min(config.run.eval_period, steps);
  }
  if (workers > 0) config.run.workers = workers;
  const auto results = harness::Run(config, &std::cerr);
  int failed = 0;
  for (const auto& r : results) {
    if (r.ok) {
      std::cout << "seed " << r.seed << ": final eval return " << r.final_eval_return << "  ("
                << r.csv_path << ")\n";
    } else {
      ++failed;
      std::cout << "seed " << r.seed << ": FAILED " << r.error << "\n";
    }
  }
  return failed == 0 ? 0 : 3;
}

int Eval(const std::string& path, int episodes, std::uint64_t seed) {
  harness::Checkpoint ckpt = harness::LoadCheckpoint(path);
  std::vector<agent::Learner*> learners;
  for (auto& l : ckpt.learners) learners.push_back(l.get());
  const harness::EvalResult r = harness::EvaluateLearners(
      learners, ckpt.config.env, DeriveSeed(seed, SeedStream::kEval, 1u << 20), episodes);
  std::cout << "episodes " << episodes << " mean_return " << r.mean_return << " mean_length "
            << r.mean_length << "\n";
  return 0;
}

int AggregateCmd(const std::vector<std::string>& inputs, const std::string& out) {
  const auto rows = harness::Aggregate(inputs);
  harness::WriteSummary(out, rows);
  std::cout << "wrote " << rows.size() << " rows to " << out << "\n";
  return 0;
}

int DebugEnv(const std::string& kind, const std::string& variant, int steps,
             std::uint64_t seed, double noise) {
  env::EnvConfig config;
  config.kind = env::ParseEnvKind(kind);
  config.transition_noise = noise;
  config.seed = seed;
  if (config.kind == env::EnvKind::kCmotp) {
    config.grid_size = 16;
    config.episode_cap = 100;
    config.cmotp_variant = env::ParseCmotpVariant(variant);
  }
  auto environment = env::MakeEnvironment(config);
  environment->Reset();
  Rng rng(MixSeed(seed));
  std::cout << environment->RenderAscii() << "\n";
  for (int t = 0; t < steps; ++t) {
    const int actions[2] = {static_cast<int>(UniformIndex(rng, env::kNumActions)),
                            static_cast<int>(UniformIndex(rng, env::kNumActions))};
    const env::JointStep js = environment->Step(actions);
    std::cout << "actions " << actions[0] << " " << actions[1] << " reward " << js.reward
              << (js.terminal ? " terminal" : "") << "\n"
              << environment->RenderAscii() << "\n";
    if (js.terminal) break;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized distributional multi-agent RL lab"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::vector<std::uint64_t> seeds;
  long steps = 0;
  int workers = 0;
  auto* train = app.add_subcommand("train", "Train learner pairs, one CSV per seed");
  train->add_option("--config", config_path, "INI config file")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--seeds", seeds, "Seed list (overrides [run] seeds)")->delimiter(',');
  train->add_option("--out", out_dir, "Output directory (overrides [run] output_dir)");
  train->add_option("--steps", steps, "Total environment steps (overrides [run] total_steps)");
  train->add_option("--workers", workers, "Seeds run in parallel");

  std::string checkpoint;
  int episodes = 100;
  std::uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("eval", "Greedy evaluation of a checkpoint");
  eval->add_option("--checkpoint", checkpoint, "Checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--episodes", episodes, "Episodes")->check(CLI::PositiveNumber);
  eval->add_option("--seed", eval_seed, "Evaluation seed");

  std::vector<std::string> inputs;
  std::string summary_path;
  auto* aggregate = app.add_subcommand("aggregate", "Mean and std across per-seed CSVs");
  aggregate->add_option("--inputs", inputs, "Per-seed CSV files")->required();
  aggregate->add_option("--out", summary_path, "Long-format summary CSV")->required();

  std::string kind = "meeting", variant = "original";
  int debug_steps = 20;
  std::uint64_t debug_seed = 0;
  double noise = 0.0;
  auto* debug = app.add_subcommand("debug-env", "Render an ASCII rollout with random actions");
  debug->add_option("--kind", kind, "meeting, meeting_image or cmotp");
  debug->add_option("--variant", variant, "CMOTP variant: original, narrow or stochastic");
  debug->add_option("--steps", debug_steps, "Maximum steps");
  debug->add_option("--seed", debug_seed, "Environment seed");
  debug->add_option("--noise", noise, "Transition noise");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*train) return Train(config_path, seeds, out_dir, steps, workers);
    if (*eval) return Eval(checkpoint, episodes, eval_seed);
    if (*aggregate) return AggregateCmd(inputs, summary_path);
    if (*debug) return DebugEnv(kind, variant, debug_steps, debug_seed, noise);
  } catch (const lhiqn::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const lhiqn::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
