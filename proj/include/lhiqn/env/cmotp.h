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

#ifndef LHIQN_ENV_CMOTP_H_
#define LHIQN_ENV_CMOTP_H_

#include <vector>

#include "lhiqn/env/environment.h"

namespace lhiqn::env {

inline constexpr float kObstacleLevel = 0.2f;

// Fixed start layout of a CMOTP grid. Coordinates scale with the grid size;
// for n = 16 the agents start at (5,14) and (11,14) and the box at (8,11).
struct CmotpLayout {
  std::array<Cell, kNumAgents> agents;
  Cell box;
  std::vector<std::uint8_t> obstacles;
  std::vector<DropZone> drop_zones;
};

// Throws ConfigError when the grid is too small for the layout.
CmotpLayout DefaultCmotpLayout(int grid_size, CmotpVariant variant);

// Two agents carry a box to a drop zone. Before pickup each agent moves on
// its own; grid edges, obstacles and the box block movement, and two agents
// proposing the same cell or swapping cells both stay. The pair is attached
// once they stand directly left and right of the box. Attached, the agents
// and box move one cell only when both agents take the same direction and
// every destination cell is free. A box entering a drop-zone cell ends the
// episode with that zone's reward.
class Cmotp : public Environment {
 public:
  explicit Cmotp(const EnvConfig& config);

  std::vector<std::vector<float>> Reset() override;
  JointStep Step(std::span<const int> actions) override;
  std::vector<std::vector<float>> Observe() override;
  std::vector<int> ObservationShape() const override;
  std::string RenderAscii() const override;

  const std::vector<DropZone>& drop_zones() const { return drop_zones_; }

 private:
  bool PickupReady() const;
  void MoveDetached(int a0, int a1);
  void MoveAttached(int a0, int a1);
  // Index of the zone containing the box, or -1.
  int ZoneOfBox() const;

  CmotpLayout layout_;
  std::vector<DropZone> drop_zones_;
};

}  // namespace lhiqn::env

#endif  // LHIQN_ENV_CMOTP_H_
