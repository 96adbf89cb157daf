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

#ifndef LHIQN_ENV_MEETING_H_
#define LHIQN_ENV_MEETING_H_

#include <vector>

#include "lhiqn/env/environment.h"

namespace lhiqn::env {

// Pixel intensities of rendered entities.
inline constexpr float kEmptyLevel = 0.0f;
inline constexpr float kTargetLevel = 0.35f;
inline constexpr float kTeammateLevel = 0.65f;
inline constexpr float kSelfLevel = 1.0f;

// Vector observation for `agent`: three blocks (self, teammate, target), each
// a one-hot grid of n*n cells followed by a visibility bit. A flickered
// entity has an all-zero block.
std::vector<float> ObserveMeeting(const GridState& state, int agent, int grid_size,
                                  double flicker, Rng& rng);

// image_size x image_size single-channel rendering, each grid cell a block of
// image_size / grid_size pixels. Entities are drawn target, teammate, self
// (later ones cover earlier ones); a flickered entity is omitted. Uniform
// noise in [-noise, noise] is added and the result clamped to [0, 1].
std::vector<float> RenderMeetingImage(const GridState& state, int agent,
                                      int grid_size, int image_size, double noise,
                                      double flicker, Rng& rng);

// Two agents and a moving target on an n x n grid. Reward 1 and episode end
// when both agents stand on the target after their moves; the target then
// takes a uniform random-walk step. Episodes also end at the step cap with
// reward 0. Agents may share cells.
class MeetingGrid : public Environment {
 public:
  explicit MeetingGrid(const EnvConfig& config);

  std::vector<std::vector<float>> Reset() override;
  JointStep Step(std::span<const int> actions) override;
  std::vector<std::vector<float>> Observe() override;
  std::vector<int> ObservationShape() const override;
  std::string RenderAscii() const override;
};

}  // namespace lhiqn::env

#endif  // LHIQN_ENV_MEETING_H_
