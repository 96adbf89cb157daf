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

#ifndef LHIQN_HARNESS_EXPERIMENT_H_
#define LHIQN_HARNESS_EXPERIMENT_H_

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lhiqn/agent/learner.h"
#include "lhiqn/env/environment.h"
#include "lhiqn/harness/config.h"

namespace lhiqn::harness {

struct EvalResult {
  double mean_return = 0.0;
  double mean_length = 0.0;
};

using JointAction = std::array<int, env::kNumAgents>;
// Sees the full environment; used for scripted baselines and oracles.
using ScriptedPolicy = std::function<JointAction(const env::Environment&, Rng&)>;

// Rolls out `episodes` episodes on a fresh environment seeded with `seed`.
// Throws std::invalid_argument when episodes < 1.
EvalResult EvaluatePolicy(const env::EnvConfig& config, std::uint64_t seed, int episodes,
                          const ScriptedPolicy& policy);

// Greedy rollouts of the learners (epsilon 0, identity distortion) in their
// evaluation slot; training state and randomness are left untouched.
EvalResult EvaluateLearners(std::span<agent::Learner* const> learners,
                            const env::EnvConfig& config, std::uint64_t seed, int episodes);

struct SeedResult {
  std::uint64_t seed = 0;
  std::string csv_path;
  std::string checkpoint_path;
  bool ok = false;
  std::string error;
  double final_eval_return = 0.0;
};

// Path of the per-seed CSV inside the output directory.
std::string SeedCsvPath(const RunConfig& run, std::uint64_t seed);

// Trains a fresh pair of learners for one seed and writes its CSV (and
// checkpoint). A non-finite loss ends the seed with an error row; the
// returned result carries the message.
SeedResult RunSeed(const ExperimentConfig& config, std::uint64_t seed,
                   std::ostream* log = nullptr);

// Every seed of config.run, up to run.workers at a time. Creates the output
// directory. Throws ConfigError for an invalid config.
std::vector<SeedResult> Run(const ExperimentConfig& config, std::ostream* log = nullptr);

}  // namespace lhiqn::harness

#endif  // LHIQN_HARNESS_EXPERIMENT_H_
