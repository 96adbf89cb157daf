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

#ifndef LHIQN_ENV_ENVIRONMENT_H_
#define LHIQN_ENV_ENVIRONMENT_H_

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lhiqn/rng.h"

namespace lhiqn::env {

inline constexpr int kNumAgents = 2;

enum Action : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3, kStay = 4 };
inline constexpr int kNumActions = 5;

struct Cell {
  int x = 0;  // column
  int y = 0;  // row, 0 at the top

  bool operator==(const Cell&) const = default;
};

Cell Move(Cell c, int action);

enum class EnvKind { kMeeting, kMeetingImage, kCmotp };
enum class CmotpVariant { kOriginal, kNarrowPassage, kStochasticReward };

EnvKind ParseEnvKind(const std::string& name);
std::string EnvKindName(EnvKind kind);
CmotpVariant ParseCmotpVariant(const std::string& name);
std::string CmotpVariantName(CmotpVariant variant);

// Terminal reward paid when the box is delivered into one of `cells`:
// `high` with probability `p_high`, otherwise `low`.
struct DropZone {
  std::vector<Cell> cells;
  double high = 1.0;
  double p_high = 1.0;
  double low = 0.0;

  double expectation() const { return p_high * high + (1.0 - p_high) * low; }
};

struct EnvConfig {
  EnvKind kind = EnvKind::kMeeting;
  int grid_size = 4;
  double transition_noise = 0.1;  // chance an action is replaced by another
  double flicker = 0.3;           // chance an entity is hidden from view
  double image_noise = 0.1;       // amplitude of additive uniform pixel noise
  int image_size = 16;
  int episode_cap = 40;
  bool static_target = false;     // meeting: target does not move
  CmotpVariant cmotp_variant = CmotpVariant::kOriginal;
  bool cmotp_flicker = false;     // CMOTP views are noisy but not flickering
  std::vector<DropZone> drop_zones;  // CMOTP: empty selects the variant default
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
};

struct GridState {
  std::array<Cell, kNumAgents> agents{};
  Cell target;        // meeting-in-a-grid
  Cell box;           // CMOTP
  bool attached = false;
  std::vector<std::uint8_t> obstacles;  // grid_size * grid_size, row-major
  int step = 0;

  bool operator==(const GridState&) const = default;
};

struct JointStep {
  std::vector<std::vector<float>> observations;  // one per agent
  double reward = 0.0;
  bool terminal = false;
};

class Environment {
 public:
  virtual ~Environment() = default;

  // Starts a new episode and returns the per-agent observations.
  virtual std::vector<std::vector<float>> Reset() = 0;
  virtual JointStep Step(std::span<const int> actions) = 0;

  virtual std::vector<int> ObservationShape() const = 0;
  int observation_size() const;
  int num_actions() const { return kNumActions; }
  int num_agents() const { return kNumAgents; }

  virtual std::string RenderAscii() const = 0;

  const GridState& state() const { return state_; }
  // Replaces the state (tests, scripted debugging). No validation beyond
  // bounds checks. Throws ConfigError.
  void SetState(const GridState& state);
  virtual std::vector<std::vector<float>> Observe() = 0;

  const EnvConfig& config() const { return config_; }
  Rng& rng() { return rng_; }

 protected:
  explicit Environment(const EnvConfig& config);

  bool InBounds(Cell c) const;
  bool Blocked(Cell c) const;  // off-grid or obstacle
  // Applies transition noise: with probability transition_noise the action
  // is replaced by one of the other four, uniformly.
  int NoisyAction(int action);

  EnvConfig config_;
  GridState state_;
  Rng rng_;
};

// Builds the environment selected by config.kind. Throws ConfigError.
std::unique_ptr<Environment> MakeEnvironment(const EnvConfig& config);

}  // namespace lhiqn::env

#endif  // LHIQN_ENV_ENVIRONMENT_H_
