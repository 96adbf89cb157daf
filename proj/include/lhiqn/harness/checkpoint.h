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

#ifndef LHIQN_HARNESS_CHECKPOINT_H_
#define LHIQN_HARNESS_CHECKPOINT_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lhiqn/agent/learner.h"
#include "lhiqn/harness/config.h"

namespace lhiqn::harness {

// End-of-run snapshot: the config that produced it, the seed, and both
// learners' networks.
struct Checkpoint {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  std::vector<std::unique_ptr<agent::Learner>> learners;
};

// Throws InputError when the file cannot be written.
void SaveCheckpoint(const std::string& path, const ExperimentConfig& config, std::uint64_t seed,
                    std::span<agent::Learner* const> learners);
// Throws InputError for unreadable or malformed files.
Checkpoint LoadCheckpoint(const std::string& path);

}  // namespace lhiqn::harness

#endif  // LHIQN_HARNESS_CHECKPOINT_H_
