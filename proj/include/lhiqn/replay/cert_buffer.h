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

#ifndef LHIQN_REPLAY_CERT_BUFFER_H_
#define LHIQN_REPLAY_CERT_BUFFER_H_

#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "lhiqn/rng.h"

namespace lhiqn::replay {

struct Transition {
  std::vector<float> observation;
  int action = 0;
  double reward = 0.0;
  std::vector<float> next_observation;
  bool terminal = false;
};

// Fixed-length window of one episode. Steps past the episode end are
// zero-filled and marked invalid.
struct Trace {
  std::vector<Transition> steps;
  std::vector<std::uint8_t> valid;

  int length() const { return static_cast<int>(steps.size()); }
  int valid_count() const;
};

// Where a trace starts: shared by every agent for one batch element.
struct SampleIndex {
  std::uint64_t episode_id = 0;
  int offset = 0;

  bool operator==(const SampleIndex&) const = default;
};

struct CertOptions {
  int num_agents = 2;
  int capacity_episodes = 5000;
  int max_episode_length = 40;
  int num_actions = 0;  // 0 skips the action range check
  std::uint64_t seed = 0;
};

// Concurrent experience replay trajectories: one episode store per agent,
// written in lockstep and sampled through a single shared index schedule so
// every agent trains on the same time steps.
//
// Protocol per episode: BeginEpisode(), then for every environment step each
// agent Record()s its transition. The episode is committed (and becomes
// sampleable) once every agent has recorded its terminal transition; the
// oldest committed episode is evicted from all stores together when capacity
// is exceeded.
class CertBuffer {
 public:
  explicit CertBuffer(const CertOptions& options);

  // Throws UsageError if an episode is still open.
  void BeginEpisode();
  // Throws UsageError when no episode is open for `agent`, when the agent's
  // episode already ended, or when the episode would exceed
  // max_episode_length. Throws std::invalid_argument for a bad action or a
  // non-finite reward.
  void Record(int agent, Transition transition);

  bool ready() const { return !stores_.front().empty(); }

  // Draws `batch` (episode, offset) pairs: episode uniform over committed
  // episodes, offset uniform within it. Advances the shared schedule
  // atomically. Returns nothing when no episode is committed.
  std::optional<std::vector<SampleIndex>> SampleIndices(int batch);

  // Materialises the traces of one agent for the given indices.
  std::vector<Trace> Traces(int agent, std::span<const SampleIndex> indices,
                            int trace_len) const;

  // SampleIndices followed by Traces for every agent; result[agent][b].
  std::optional<std::vector<std::vector<Trace>>> SampleSynchronized(int batch,
                                                                    int trace_len);

  int num_agents() const { return options_.num_agents; }
  std::size_t num_episodes(int agent) const { return stores_.at(agent).size(); }
  std::vector<int> EpisodeLengths(int agent) const;
  std::vector<std::uint64_t> EpisodeIds(int agent) const;

 private:
  struct Episode {
    std::uint64_t id = 0;
    std::vector<Transition> steps;
  };

  void CommitIfClosed();

  CertOptions options_;
  std::vector<std::deque<Episode>> stores_;
  std::vector<Episode> open_;
  std::vector<std::uint8_t> is_open_;
  std::vector<std::uint8_t> closed_;
  bool episode_active_ = false;
  std::uint64_t next_id_ = 0;

  std::mutex sample_mutex_;
  Rng rng_;
};

}  // namespace lhiqn::replay

#endif  // LHIQN_REPLAY_CERT_BUFFER_H_
