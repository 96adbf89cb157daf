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

#include "lhiqn/env/meeting.h"

#include <algorithm>
#include <sstream>

#include "lhiqn/errors.h"

namespace lhiqn::env {

namespace {

bool Flickers(double flicker, Rng& rng) {
  return flicker > 0.0 && Uniform01(rng) < flicker;
}

void FillBlock(std::vector<float>& image, int image_size, int block, Cell c, float level) {
  for (int dy = 0; dy < block; ++dy) {
    for (int dx = 0; dx < block; ++dx) {
      image[static_cast<std::size_t>(c.y * block + dy) * image_size + c.x * block + dx] = level;
    }
  }
}

}  // namespace

std::vector<float> ObserveMeeting(const GridState& state, int agent, int grid_size,
                                  double flicker, Rng& rng) {
  const int cells = grid_size * grid_size;
  std::vector<float> obs(3 * (cells + 1), 0.0f);
  const Cell entities[3] = {state.agents[agent], state.agents[1 - agent], state.target};
  for (int e = 0; e < 3; ++e) {
    if (Flickers(flicker, rng)) continue;
    float* block = obs.data() + e * (cells + 1);
    block[entities[e].y * grid_size + entities[e].x] = 1.0f;
    block[cells] = 1.0f;
  }
  return obs;
}

std::vector<float> RenderMeetingImage(const GridState& state, int agent,
                                      int grid_size, int image_size, double noise,
                                      double flicker, Rng& rng) {
  if (image_size % grid_size != 0) {
    throw ConfigError("render: grid size must divide the image size");
  }
  const int block = image_size / grid_size;
  std::vector<float> image(static_cast<std::size_t>(image_size) * image_size, kEmptyLevel);
  const Cell entities[3] = {state.target, state.agents[1 - agent], state.agents[agent]};
  const float levels[3] = {kTargetLevel, kTeammateLevel, kSelfLevel};
  for (int e = 0; e < 3; ++e) {
    if (Flickers(flicker, rng)) continue;
    FillBlock(image, image_size, block, entities[e], levels[e]);
  }
  if (noise > 0.0) {
    for (float& p : image) {
      const double v = p + (2.0 * Uniform01(rng) - 1.0) * noise;
      p = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return image;
}

MeetingGrid::MeetingGrid(const EnvConfig& config) : Environment(config) {
  if (config_.kind == EnvKind::kCmotp) throw ConfigError("meeting: wrong env kind");
}

std::vector<std::vector<float>> MeetingGrid::Reset() {
  const int n = config_.grid_size;
  // Three distinct cells: agent 0, agent 1, target.
  std::vector<int> picked;
  while (picked.size() < 3) {
    const int c = static_cast<int>(UniformIndex(rng_, static_cast<std::uint64_t>(n) * n));
    if (std::find(picked.begin(), picked.end(), c) == picked.end()) picked.push_back(c);
  }
  state_.agents[0] = {picked[0] % n, picked[0] / n};
  state_.agents[1] = {picked[1] % n, picked[1] / n};
  state_.target = {picked[2] % n, picked[2] / n};
  state_.step = 0;
  return Observe();
}

JointStep MeetingGrid::Step(std::span<const int> actions) {
  if (actions.size() != kNumAgents) throw UsageError("meeting: need one action per agent");
  for (int a = 0; a < kNumAgents; ++a) {
    if (actions[a] < 0 || actions[a] >= kNumActions) {
      throw std::invalid_argument("meeting: action out of range");
    }
  }
  for (int a = 0; a < kNumAgents; ++a) {
    const Cell next = Move(state_.agents[a], NoisyAction(actions[a]));
    if (!Blocked(next)) state_.agents[a] = next;
  }
  ++state_.step;
  JointStep out;
  const bool met = state_.agents[0] == state_.target && state_.agents[1] == state_.target;
  if (met) {
    out.reward = 1.0;
    out.terminal = true;
  } else {
    if (!config_.static_target) {
      const Cell next = Move(state_.target, static_cast<int>(UniformIndex(rng_, kNumActions)));
      if (!Blocked(next)) state_.target = next;
    }
    out.terminal = state_.step >= config_.episode_cap;
  }
  out.observations = Observe();
  return out;
}

std::vector<std::vector<float>> MeetingGrid::Observe() {
  std::vector<std::vector<float>> obs;
  for (int a = 0; a < kNumAgents; ++a) {
    if (config_.kind == EnvKind::kMeetingImage) {
      obs.push_back(RenderMeetingImage(state_, a, config_.grid_size, config_.image_size,
                                       config_.image_noise, config_.flicker, rng_));
    } else {
      obs.push_back(ObserveMeeting(state_, a, config_.grid_size, config_.flicker, rng_));
    }
  }
  return obs;
}

std::vector<int> MeetingGrid::ObservationShape() const {
  if (config_.kind == EnvKind::kMeetingImage) {
    return {1, config_.image_size, config_.image_size};
  }
  return {3 * (config_.grid_size * config_.grid_size + 1)};
}

std::string MeetingGrid::RenderAscii() const {
  std::ostringstream out;
  const int n = config_.grid_size;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const Cell c{x, y};
      const bool a0 = state_.agents[0] == c, a1 = state_.agents[1] == c;
      const bool t = state_.target == c;
      char ch = '.';
      if (a0 && a1) ch = t ? '*' : 'X';
      else if (a0) ch = t ? 'a' : 'A';
      else if (a1) ch = t ? 'b' : 'B';
      else if (t) ch = 'T';
      out << ch;
    }
    out << '\n';
  }
  out << "step " << state_.step << "\n";
  return out.str();
}

}  // namespace lhiqn::env
