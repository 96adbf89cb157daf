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

#include "lhiqn/env/cmotp.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "lhiqn/env/meeting.h"
#include "lhiqn/errors.h"

namespace lhiqn::env {

namespace {

DropZone RowZone(int y, int x0, int x1, double high, double p_high, double low) {
  DropZone zone;
  for (int x = x0; x <= x1; ++x) zone.cells.push_back({x, y});
  zone.high = high;
  zone.p_high = p_high;
  zone.low = low;
  return zone;
}

}  // namespace

CmotpLayout DefaultCmotpLayout(int n, CmotpVariant variant) {
  if (n < 10) {
    throw ConfigError("cmotp: grid_size " + std::to_string(n) + " is too small (need >= 10)");
  }
  CmotpLayout layout;
  const int mid = n / 2;
  layout.agents = {Cell{mid - 3, n - 2}, Cell{mid + 3, n - 2}};
  layout.box = {mid, n - 5};
  layout.obstacles.assign(static_cast<std::size_t>(n) * n, 0);
  switch (variant) {
    case CmotpVariant::kOriginal:
      layout.drop_zones = {RowZone(0, mid - 2, mid + 2, 1.0, 1.0, 0.0)};
      break;
    case CmotpVariant::kNarrowPassage: {
      // A wall across the grid with a gap exactly as wide as the carried box.
      const int wall = n * 3 / 8;
      for (int x = 0; x < n; ++x) {
        if (x < mid - 1 || x > mid + 1) layout.obstacles[wall * n + x] = 1;
      }
      layout.drop_zones = {RowZone(0, mid - 2, mid + 2, 1.0, 1.0, 0.0)};
      break;
    }
    case CmotpVariant::kStochasticReward:
      layout.drop_zones = {RowZone(0, 1, 4, 0.8, 1.0, 0.8),
                           RowZone(0, n - 5, n - 2, 1.0, 0.6, 0.4)};
      break;
  }
  return layout;
}

Cmotp::Cmotp(const EnvConfig& config)
    : Environment(config), layout_(DefaultCmotpLayout(config.grid_size, config.cmotp_variant)) {
  if (config_.kind != EnvKind::kCmotp) throw ConfigError("cmotp: wrong env kind");
  drop_zones_ = config_.drop_zones.empty() ? layout_.drop_zones : config_.drop_zones;
  const int n = config_.grid_size;
  for (const DropZone& zone : drop_zones_) {
    for (const Cell& c : zone.cells) {
      if (!InBounds(c)) throw ConfigError("cmotp: drop zone cell outside the grid");
    }
  }
  std::vector<Cell> fixed = {layout_.agents[0], layout_.agents[1], layout_.box};
  for (const Cell& c : fixed) {
    if (layout_.obstacles[c.y * n + c.x]) throw ConfigError("cmotp: start cell is an obstacle");
  }
  state_.obstacles = layout_.obstacles;
}

std::vector<std::vector<float>> Cmotp::Reset() {
  state_.agents = layout_.agents;
  state_.box = layout_.box;
  state_.attached = false;
  state_.obstacles = layout_.obstacles;
  state_.step = 0;
  return Observe();
}

bool Cmotp::PickupReady() const {
  const Cell left{state_.box.x - 1, state_.box.y};
  const Cell right{state_.box.x + 1, state_.box.y};
  return (state_.agents[0] == left && state_.agents[1] == right) ||
         (state_.agents[0] == right && state_.agents[1] == left);
}

void Cmotp::MoveDetached(int a0, int a1) {
  const std::array<Cell, 2> cur = state_.agents;
  std::array<Cell, 2> next = {Move(cur[0], a0), Move(cur[1], a1)};
  for (int a = 0; a < 2; ++a) {
    if (Blocked(next[a]) || next[a] == state_.box) next[a] = cur[a];
  }
  if (next[0] == next[1] || (next[0] == cur[1] && next[1] == cur[0])) return;
  // An agent may follow its teammate but not walk into one that stays put.
  if (next[0] == cur[1] && next[1] == cur[1]) next[0] = cur[0];
  if (next[1] == cur[0] && next[0] == cur[0]) next[1] = cur[1];
  if (next[0] == next[1]) return;
  state_.agents = next;
}

void Cmotp::MoveAttached(int a0, int a1) {
  if (a0 != a1 || a0 == kStay) return;
  const Cell box = Move(state_.box, a0);
  const Cell p0 = Move(state_.agents[0], a0);
  const Cell p1 = Move(state_.agents[1], a0);
  if (Blocked(box) || Blocked(p0) || Blocked(p1)) return;
  state_.box = box;
  state_.agents = {p0, p1};
}

int Cmotp::ZoneOfBox() const {
  for (std::size_t z = 0; z < drop_zones_.size(); ++z) {
    const auto& cells = drop_zones_[z].cells;
    if (std::find(cells.begin(), cells.end(), state_.box) != cells.end()) {
      return static_cast<int>(z);
    }
  }
  return -1;
}

JointStep Cmotp::Step(std::span<const int> actions) {
  if (actions.size() != kNumAgents) throw UsageError("cmotp: need one action per agent");
  for (int a = 0; a < kNumAgents; ++a) {
    if (actions[a] < 0 || actions[a] >= kNumActions) {
      throw std::invalid_argument("cmotp: action out of range");
    }
  }
  const int a0 = NoisyAction(actions[0]);
  const int a1 = NoisyAction(actions[1]);
  if (state_.attached) {
    MoveAttached(a0, a1);
  } else {
    MoveDetached(a0, a1);
    state_.attached = PickupReady();
  }
  ++state_.step;
  JointStep out;
  const int zone = state_.attached ? ZoneOfBox() : -1;
  if (zone >= 0) {
    const DropZone& z = drop_zones_[zone];
    const bool high = z.p_high >= 1.0 || Uniform01(rng_) < z.p_high;
    out.reward = high ? z.high : z.low;
    out.terminal = true;
  } else {
    out.terminal = state_.step >= config_.episode_cap;
  }
  out.observations = Observe();
  return out;
}

std::vector<std::vector<float>> Cmotp::Observe() {
  const int n = config_.grid_size;
  const int size = config_.image_size;
  const int block = size / n;
  const double flicker = config_.cmotp_flicker ? config_.flicker : 0.0;
  std::vector<std::vector<float>> obs;
  for (int agent = 0; agent < kNumAgents; ++agent) {
    std::vector<float> image(static_cast<std::size_t>(size) * size, kEmptyLevel);
    auto fill = [&](Cell c, float level) {
      for (int dy = 0; dy < block; ++dy) {
        for (int dx = 0; dx < block; ++dx) {
          image[static_cast<std::size_t>(c.y * block + dy) * size + c.x * block + dx] = level;
        }
      }
    };
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        if (state_.obstacles[y * n + x]) fill({x, y}, kObstacleLevel);
      }
    }
    const Cell entities[3] = {state_.box, state_.agents[1 - agent], state_.agents[agent]};
    const float levels[3] = {kTargetLevel, kTeammateLevel, kSelfLevel};
    for (int e = 0; e < 3; ++e) {
      if (flicker > 0.0 && Uniform01(rng_) < flicker) continue;
      fill(entities[e], levels[e]);
    }
    if (config_.image_noise > 0.0) {
      for (float& p : image) {
        const double v = p + (2.0 * Uniform01(rng_) - 1.0) * config_.image_noise;
        p = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
    obs.push_back(std::move(image));
  }
  return obs;
}

std::vector<int> Cmotp::ObservationShape() const {
  return {1, config_.image_size, config_.image_size};
}

std::string Cmotp::RenderAscii() const {
  const int n = config_.grid_size;
  std::vector<std::string> rows(n, std::string(n, '.'));
  for (const DropZone& zone : drop_zones_) {
    for (const Cell& c : zone.cells) rows[c.y][c.x] = '_';
  }
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (state_.obstacles[y * n + x]) rows[y][x] = '#';
    }
  }
  rows[state_.box.y][state_.box.x] = 'O';
  rows[state_.agents[0].y][state_.agents[0].x] = 'A';
  rows[state_.agents[1].y][state_.agents[1].x] = 'B';
  std::ostringstream out;
  for (const std::string& row : rows) out << row << '\n';
  out << "step " << state_.step << (state_.attached ? " attached" : "") << "\n";
  return out.str();
}

}  // namespace lhiqn::env
