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

#include "lhiqn/env/environment.h"

#include <functional>
#include <numeric>

#include "lhiqn/env/cmotp.h"
#include "lhiqn/env/meeting.h"
#include "lhiqn/errors.h"

namespace lhiqn::env {

Cell Move(Cell c, int action) {
  switch (action) {
    case kUp: return {c.x, c.y - 1};
    case kDown: return {c.x, c.y + 1};
    case kLeft: return {c.x - 1, c.y};
    case kRight: return {c.x + 1, c.y};
    default: return c;
  }
}

EnvKind ParseEnvKind(const std::string& name) {
  if (name == "meeting") return EnvKind::kMeeting;
  if (name == "meeting_image") return EnvKind::kMeetingImage;
  if (name == "cmotp") return EnvKind::kCmotp;
  throw ConfigError("unknown env kind '" + name + "' (expected meeting, meeting_image or cmotp)");
}

std::string EnvKindName(EnvKind kind) {
  switch (kind) {
    case EnvKind::kMeeting: return "meeting";
    case EnvKind::kMeetingImage: return "meeting_image";
    case EnvKind::kCmotp: return "cmotp";
  }
  return "meeting";
}

CmotpVariant ParseCmotpVariant(const std::string& name) {
  if (name == "original") return CmotpVariant::kOriginal;
  if (name == "narrow") return CmotpVariant::kNarrowPassage;
  if (name == "stochastic") return CmotpVariant::kStochasticReward;
  throw ConfigError("unknown CMOTP variant '" + name +
                    "' (expected original, narrow or stochastic)");
}

std::string CmotpVariantName(CmotpVariant variant) {
  switch (variant) {
    case CmotpVariant::kOriginal: return "original";
    case CmotpVariant::kNarrowPassage: return "narrow";
    case CmotpVariant::kStochasticReward: return "stochastic";
  }
  return "original";
}

void EnvConfig::Validate() const {
  auto probability = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError(std::string("env: ") + name + " must lie in [0, 1]");
    }
  };
  probability(transition_noise, "transition_noise");
  probability(flicker, "flicker");
  if (!(image_noise >= 0.0 && image_noise <= 1.0)) {
    throw ConfigError("env: image_noise must lie in [0, 1]");
  }
  if (grid_size < 3) throw ConfigError("env: grid_size must be >= 3");
  if (episode_cap < 1) throw ConfigError("env: episode_cap must be >= 1");
  if (kind != EnvKind::kMeeting) {
    if (image_size < grid_size || image_size % grid_size != 0) {
      throw ConfigError("env: grid_size " + std::to_string(grid_size) +
                        " must divide image_size " + std::to_string(image_size));
    }
  }
  for (const DropZone& zone : drop_zones) {
    probability(zone.p_high, "drop zone p_high");
    if (zone.cells.empty()) throw ConfigError("env: drop zone without cells");
  }
}

int Environment::observation_size() const {
  const auto shape = ObservationShape();
  return std::accumulate(shape.begin(), shape.end(), 1, std::multiplies<int>());
}

Environment::Environment(const EnvConfig& config) : config_(config), rng_(config.seed) {
  config_.Validate();
  state_.obstacles.assign(static_cast<std::size_t>(config_.grid_size) * config_.grid_size, 0);
}

bool Environment::InBounds(Cell c) const {
  return c.x >= 0 && c.y >= 0 && c.x < config_.grid_size && c.y < config_.grid_size;
}

bool Environment::Blocked(Cell c) const {
  return !InBounds(c) ||
         state_.obstacles[static_cast<std::size_t>(c.y) * config_.grid_size + c.x] != 0;
}

int Environment::NoisyAction(int action) {
  if (config_.transition_noise > 0.0 && Uniform01(rng_) < config_.transition_noise) {
    const int other = static_cast<int>(UniformIndex(rng_, kNumActions - 1));
    return other >= action ? other + 1 : other;
  }
  return action;
}

void Environment::SetState(const GridState& state) {
  const std::size_t cells = static_cast<std::size_t>(config_.grid_size) * config_.grid_size;
  if (state.obstacles.size() != cells) {
    throw ConfigError("env: obstacle mask has the wrong size");
  }
  GridState previous = state_;
  state_ = state;
  for (const Cell& c : state.agents) {
    if (Blocked(c)) {
      state_ = previous;
      throw ConfigError("env: agent placed outside the grid or on an obstacle");
    }
  }
}

std::unique_ptr<Environment> MakeEnvironment(const EnvConfig& config) {
  switch (config.kind) {
    case EnvKind::kMeeting:
    case EnvKind::kMeetingImage:
      return std::make_unique<MeetingGrid>(config);
    case EnvKind::kCmotp:
      return std::make_unique<Cmotp>(config);
  }
  throw ConfigError("env: unknown kind");
}

}  // namespace lhiqn::env
