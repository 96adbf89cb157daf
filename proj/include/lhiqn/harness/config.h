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

#ifndef LHIQN_HARNESS_CONFIG_H_
#define LHIQN_HARNESS_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "lhiqn/agent/hyper_params.h"
#include "lhiqn/env/environment.h"

namespace lhiqn::harness {

struct RunConfig {
  std::string name = "run";
  long total_steps = 200000;
  long eval_period = 5000;
  int eval_episodes = 20;
  int final_eval_episodes = 100;  // the eval row at total_steps
  std::vector<std::uint64_t> seeds = {1};
  std::string output_dir = "runs";
  long warmup_steps = 1000;   // random actions, no training
  int train_period = 1;       // environment steps per training step
  int replay_capacity = 5000; // episodes
  int workers = 1;            // seeds run in parallel
  bool threaded_learners = false;
  bool wall_clock = false;    // record wall_seconds (breaks byte-identical CSVs)
  bool checkpoint = true;     // write seed_<s>.ckpt at the end of a run
};

struct ExperimentConfig {
  env::EnvConfig env;
  agent::HyperParams agent;
  RunConfig run;

  // Throws ConfigError.
  void Validate() const;
};

// Parses INI text with [env], [agent] and [run] sections. Missing keys keep
// their defaults; unknown sections or keys are errors. Throws ConfigError.
ExperimentConfig ParseConfig(const std::string& text);
ExperimentConfig LoadConfig(const std::string& path);

// INI text that ParseConfig maps back to the same config.
std::string DumpConfig(const ExperimentConfig& config);

}  // namespace lhiqn::harness

#endif  // LHIQN_HARNESS_CONFIG_H_
