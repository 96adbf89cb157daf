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

#include "lhiqn/replay/cert_buffer.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lhiqn/errors.h"

namespace lhiqn::replay {

int Trace::valid_count() const {
  int n = 0;
  for (std::uint8_t v : valid) n += v ? 1 : 0;
  return n;
}

CertBuffer::CertBuffer(const CertOptions& options)
    : options_(options),
      stores_(options.num_agents),
      open_(options.num_agents),
      is_open_(options.num_agents, 0),
      closed_(options.num_agents, 0),
      rng_(options.seed) {
  if (options.num_agents < 1) throw ConfigError("replay: need at least one agent");
  if (options.capacity_episodes < 1) throw ConfigError("replay: capacity must be >= 1 episode");
  if (options.max_episode_length < 1) throw ConfigError("replay: episode cap must be >= 1");
}

void CertBuffer::BeginEpisode() {
  if (episode_active_) {
    throw UsageError("replay: BeginEpisode while episode " + std::to_string(next_id_) +
                     " is still open");
  }
  for (int a = 0; a < options_.num_agents; ++a) {
    open_[a] = Episode{next_id_, {}};
    is_open_[a] = 1;
    closed_[a] = 0;
  }
  episode_active_ = true;
}

void CertBuffer::Record(int agent, Transition transition) {
  if (agent < 0 || agent >= options_.num_agents) {
    throw std::invalid_argument("replay: agent id " + std::to_string(agent) + " out of range");
  }
  if (!is_open_[agent]) {
    throw UsageError("replay: agent " + std::to_string(agent) +
                     " recorded without an open episode (call BeginEpisode)");
  }
  if (closed_[agent]) {
    throw UsageError("replay: agent " + std::to_string(agent) +
                     " recorded after its terminal transition");
  }
  Episode& episode = open_[agent];
  if (static_cast<int>(episode.steps.size()) >= options_.max_episode_length) {
    throw UsageError("replay: agent " + std::to_string(agent) + " recorded step " +
                     std::to_string(episode.steps.size() + 1) + " beyond the episode cap of " +
                     std::to_string(options_.max_episode_length));
  }
  if (transition.action < 0 ||
      (options_.num_actions > 0 && transition.action >= options_.num_actions)) {
    throw std::invalid_argument("replay: action " + std::to_string(transition.action) +
                                " out of range");
  }
  if (!std::isfinite(transition.reward)) {
    throw std::invalid_argument("replay: non-finite reward");
  }
  const bool terminal = transition.terminal;
  episode.steps.push_back(std::move(transition));
  if (terminal) {
    closed_[agent] = 1;
    CommitIfClosed();
  }
}

void CertBuffer::CommitIfClosed() {
  for (int a = 0; a < options_.num_agents; ++a) {
    if (!closed_[a]) return;
  }
  const std::size_t length = open_[0].steps.size();
  for (int a = 1; a < options_.num_agents; ++a) {
    if (open_[a].steps.size() != length) {
      throw UsageError("replay: agents recorded episodes of different lengths (" +
                       std::to_string(length) + " vs " +
                       std::to_string(open_[a].steps.size()) + ")");
    }
  }
  for (int a = 0; a < options_.num_agents; ++a) {
    stores_[a].push_back(std::move(open_[a]));
    if (static_cast<int>(stores_[a].size()) > options_.capacity_episodes) {
      stores_[a].pop_front();
    }
    open_[a] = Episode{};
    is_open_[a] = 0;
    closed_[a] = 0;
  }
  episode_active_ = false;
  ++next_id_;
}

std::optional<std::vector<SampleIndex>> CertBuffer::SampleIndices(int batch) {
  std::lock_guard<std::mutex> lock(sample_mutex_);
  const std::deque<Episode>& store = stores_.front();
  if (store.empty()) return std::nullopt;
  std::vector<SampleIndex> indices;
  indices.reserve(batch);
  for (int b = 0; b < batch; ++b) {
    const Episode& episode = store[UniformIndex(rng_, store.size())];
    const int offset = static_cast<int>(UniformIndex(rng_, episode.steps.size()));
    indices.push_back({episode.id, offset});
  }
  return indices;
}

std::vector<Trace> CertBuffer::Traces(int agent, std::span<const SampleIndex> indices,
                                      int trace_len) const {
  if (trace_len < 1) throw std::invalid_argument("replay: trace length must be >= 1");
  const std::deque<Episode>& store = stores_.at(agent);
  std::vector<Trace> traces;
  traces.reserve(indices.size());
  for (const SampleIndex& index : indices) {
    if (store.empty() || index.episode_id < store.front().id ||
        index.episode_id > store.back().id) {
      throw UsageError("replay: episode " + std::to_string(index.episode_id) +
                       " is no longer stored");
    }
    const Episode& episode = store[index.episode_id - store.front().id];
    Trace trace;
    trace.steps.reserve(trace_len);
    trace.valid.reserve(trace_len);
    for (int t = 0; t < trace_len; ++t) {
      const std::size_t step = static_cast<std::size_t>(index.offset) + t;
      if (step < episode.steps.size()) {
        trace.steps.push_back(episode.steps[step]);
        trace.valid.push_back(1);
      } else {
        const Transition& last = episode.steps.back();
        Transition pad;
        pad.observation.assign(last.observation.size(), 0.0f);
        pad.next_observation.assign(last.next_observation.size(), 0.0f);
        trace.steps.push_back(std::move(pad));
        trace.valid.push_back(0);
      }
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

std::optional<std::vector<std::vector<Trace>>> CertBuffer::SampleSynchronized(
    int batch, int trace_len) {
  auto indices = SampleIndices(batch);
  if (!indices) return std::nullopt;
  std::vector<std::vector<Trace>> out;
  out.reserve(options_.num_agents);
  for (int a = 0; a < options_.num_agents; ++a) out.push_back(Traces(a, *indices, trace_len));
  return out;
}

std::vector<int> CertBuffer::EpisodeLengths(int agent) const {
  std::vector<int> lengths;
  for (const Episode& e : stores_.at(agent)) lengths.push_back(static_cast<int>(e.steps.size()));
  return lengths;
}

std::vector<std::uint64_t> CertBuffer::EpisodeIds(int agent) const {
  std::vector<std::uint64_t> ids;
  for (const Episode& e : stores_.at(agent)) ids.push_back(e.id);
  return ids;
}

}  // namespace lhiqn::replay
