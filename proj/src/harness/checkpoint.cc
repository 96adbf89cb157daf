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

#include "lhiqn/harness/checkpoint.h"

#include <fstream>

#include "lhiqn/env/environment.h"
#include "lhiqn/errors.h"

namespace lhiqn::harness {

namespace {
constexpr char kMagic[] = "lhiqn-checkpoint";
constexpr int kVersion = 1;
}  // namespace

void SaveCheckpoint(const std::string& path, const ExperimentConfig& config, std::uint64_t seed,
                    std::span<agent::Learner* const> learners) {
  std::ofstream out(path);
  if (!out) throw InputError("checkpoint: cannot create " + path);
  const std::string text = DumpConfig(config);
  out << kMagic << " v" << kVersion << "\n";
  out << "seed " << seed << "\n";
  out << "config " << text.size() << "\n" << text;
  out << "agents " << learners.size() << "\n";
  for (agent::Learner* learner : learners) learner->Save(out);
  if (!out) throw InputError("checkpoint: write to " + path + " failed");
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("checkpoint: cannot open " + path);
  std::string magic, version, word;
  Checkpoint ckpt;
  if (!(in >> magic >> version) || magic != kMagic || version != "v" + std::to_string(kVersion)) {
    throw InputError(path + ": not a version " + std::to_string(kVersion) + " checkpoint");
  }
  std::size_t bytes = 0;
  if (!(in >> word >> ckpt.seed) || word != "seed" || !(in >> word >> bytes) ||
      word != "config") {
    throw InputError(path + ": malformed header");
  }
  in.get();  // newline after the byte count
  std::string text(bytes, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(bytes))) {
    throw InputError(path + ": truncated config block");
  }
  try {
    ckpt.config = ParseConfig(text);
  } catch (const ConfigError& e) {
    throw InputError(path + ": " + e.what());
  }
  std::size_t count = 0;
  if (!(in >> word >> count) || word != "agents" || count != env::kNumAgents) {
    throw InputError(path + ": expected " + std::to_string(env::kNumAgents) + " agents");
  }
  const auto environment = env::MakeEnvironment(ckpt.config.env);
  for (std::size_t a = 0; a < count; ++a) {
    auto learner = agent::MakeLearner(ckpt.config.agent, environment->ObservationShape(),
                                      environment->num_actions(), 0, 0);
    learner->Load(in);
    ckpt.learners.push_back(std::move(learner));
  }
  return ckpt;
}

}  // namespace lhiqn::harness
