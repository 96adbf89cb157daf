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

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "lhiqn/env/cmotp.h"
#include "lhiqn/env/environment.h"
#include "lhiqn/env/meeting.h"
#include "lhiqn/errors.h"
#include "lhiqn/harness/experiment.h"
#include "lhiqn/rng.h"
#include "meeting_oracle.h"

namespace lhiqn::env {
namespace {

EnvConfig Quiet(EnvKind kind = EnvKind::kMeeting) {
  EnvConfig c;
  c.kind = kind;
  c.transition_noise = 0.0;
  c.flicker = 0.0;
  c.image_noise = 0.0;
  c.static_target = true;
  if (kind == EnvKind::kCmotp) {
    c.grid_size = 16;
    c.episode_cap = 100;
  }
  return c;
}

GridState MeetingState(Cell a0, Cell a1, Cell target, int n = 4) {
  GridState s;
  s.agents = {a0, a1};
  s.target = target;
  s.obstacles.assign(n * n, 0);
  return s;
}

JointStep Act(Environment& env, int a0, int a1) {
  const std::vector<int> actions{a0, a1};
  return env.Step(actions);
}

// Meeting-in-a-grid.

TEST(MeetingTest, ResetIsDeterministic) {
  EnvConfig c;
  c.seed = 42;
  auto a = MakeEnvironment(c), b = MakeEnvironment(c);
  for (int episode = 0; episode < 20; ++episode) {
    EXPECT_EQ(a->Reset(), b->Reset());
    EXPECT_EQ(a->state(), b->state());
  }
}

TEST(MeetingTest, RolloutsStayInBounds) {
  EnvConfig c;
  c.seed = 1;
  auto env = MakeEnvironment(c);
  Rng rng(2);
  for (int episode = 0; episode < 200; ++episode) {
    env->Reset();
    const GridState& s = env->state();
    EXPECT_NE(s.agents[0], s.agents[1]);
    EXPECT_NE(s.agents[0], s.target);
    EXPECT_NE(s.agents[1], s.target);
    for (;;) {
      const JointStep step = Act(*env, static_cast<int>(UniformIndex(rng, 5)),
                                 static_cast<int>(UniformIndex(rng, 5)));
      for (const Cell& cell : {s.agents[0], s.agents[1], s.target}) {
        ASSERT_GE(cell.x, 0);
        ASSERT_LE(cell.x, 3);
        ASSERT_GE(cell.y, 0);
        ASSERT_LE(cell.y, 3);
      }
      ASSERT_LE(s.step, 40);
      ASSERT_TRUE(step.reward == 0.0 || step.reward == 1.0);
      if (step.terminal) break;
    }
  }
}

TEST(MeetingTest, DeterministicMove) {
  auto env = MakeEnvironment(Quiet());
  env->SetState(MeetingState({0, 0}, {3, 3}, {2, 2}));
  Act(*env, kRight, kStay);
  EXPECT_EQ(env->state().agents[0], (Cell{1, 0}));
  Act(*env, kUp, kDown);  // both off the grid
  EXPECT_EQ(env->state().agents[0], (Cell{1, 0}));
  EXPECT_EQ(env->state().agents[1], (Cell{3, 3}));
  Act(*env, kDown, kLeft);
  EXPECT_EQ(env->state().agents[0], (Cell{1, 1}));
  EXPECT_EQ(env->state().agents[1], (Cell{2, 3}));
}

TEST(MeetingTest, MeetingEndsTheEpisode) {
  auto env = MakeEnvironment(Quiet());
  env->SetState(MeetingState({1, 2}, {3, 2}, {2, 2}));
  const JointStep step = Act(*env, kRight, kLeft);
  EXPECT_EQ(step.reward, 1.0);
  EXPECT_TRUE(step.terminal);
}

TEST(MeetingTest, OneAgentOnTargetIsNotEnough) {
  auto env = MakeEnvironment(Quiet());
  env->SetState(MeetingState({1, 2}, {3, 0}, {2, 2}));
  const JointStep step = Act(*env, kRight, kStay);
  EXPECT_EQ(step.reward, 0.0);
  EXPECT_FALSE(step.terminal);
}

TEST(MeetingTest, CapEndsTheEpisode) {
  auto env = MakeEnvironment(Quiet());
  env->SetState(MeetingState({0, 0}, {3, 3}, {0, 3}));
  for (int t = 1; t < 40; ++t) {
    const JointStep step = Act(*env, kStay, kStay);
    ASSERT_FALSE(step.terminal) << "step " << t;
  }
  const JointStep last = Act(*env, kStay, kStay);
  EXPECT_TRUE(last.terminal);
  EXPECT_EQ(last.reward, 0.0);
  EXPECT_EQ(env->state().step, 40);
}

TEST(MeetingTest, TransitionNoiseFrequencies) {
  EnvConfig c = Quiet();
  c.transition_noise = 0.1;
  c.seed = 9;
  auto env = MakeEnvironment(c);
  // From the centre every action lands on a distinct cell.
  std::vector<int> counts(5, 0);
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) {
    env->SetState(MeetingState({1, 1}, {3, 3}, {0, 3}));
    Act(*env, kRight, kStay);
    const Cell got = env->state().agents[0];
    for (int a = 0; a < 5; ++a) {
      if (Move({1, 1}, a) == got) ++counts[a];
    }
  }
  EXPECT_NEAR(counts[kRight] / double(trials), 0.9, 0.01);
  for (int a : {kUp, kDown, kLeft, kStay}) {
    EXPECT_NEAR(counts[a] / double(trials), 0.025, 0.005) << "action " << a;
  }
}

TEST(MeetingTest, TargetRandomWalk) {
  EnvConfig c = Quiet();
  c.static_target = false;
  c.seed = 4;
  auto env = MakeEnvironment(c);
  std::vector<int> counts(5, 0);
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) {
    env->SetState(MeetingState({0, 0}, {3, 3}, {1, 1}));
    Act(*env, kStay, kStay);
    for (int a = 0; a < 5; ++a) {
      if (Move({1, 1}, a) == env->state().target) ++counts[a];
    }
  }
  for (int a = 0; a < 5; ++a) EXPECT_NEAR(counts[a] / double(trials), 0.2, 0.015);
}

TEST(MeetingTest, VectorObservationEncoding) {
  auto env = MakeEnvironment(Quiet());
  env->SetState(MeetingState({1, 0}, {2, 3}, {0, 2}));
  const auto obs = env->Observe();
  ASSERT_EQ(obs.size(), 2u);
  EXPECT_EQ(env->ObservationShape(), std::vector<int>{51});
  ASSERT_EQ(obs[0].size(), 51u);
  auto hot = [](const std::vector<float>& o, int block) {
    std::vector<int> idx;
    for (int i = 0; i < 16; ++i) {
      if (o[block * 17 + i] != 0.0f) idx.push_back(i);
    }
    return idx;
  };
  EXPECT_EQ(hot(obs[0], 0), std::vector<int>{1});
  EXPECT_EQ(hot(obs[0], 1), std::vector<int>{14});
  EXPECT_EQ(hot(obs[0], 2), std::vector<int>{8});
  EXPECT_EQ(hot(obs[1], 0), std::vector<int>{14});
  EXPECT_EQ(hot(obs[1], 1), std::vector<int>{1});
  for (int b = 0; b < 3; ++b) EXPECT_EQ(obs[0][b * 17 + 16], 1.0f);
}

TEST(MeetingTest, FlickerExtremes) {
  for (double p : {0.0, 1.0}) {
    EnvConfig c = Quiet();
    c.flicker = p;
    auto env = MakeEnvironment(c);
    env->SetState(MeetingState({1, 0}, {2, 3}, {0, 2}));
    for (int i = 0; i < 100; ++i) {
      for (const auto& o : env->Observe()) {
        for (int b = 0; b < 3; ++b) ASSERT_EQ(o[b * 17 + 16], p == 0.0 ? 1.0f : 0.0f);
        if (p == 1.0) {
          for (float v : o) ASSERT_EQ(v, 0.0f);
        }
      }
    }
  }
}

TEST(MeetingTest, FlickerRate) {
  EnvConfig c = Quiet();
  c.flicker = 0.3;
  c.seed = 17;
  auto env = MakeEnvironment(c);
  env->SetState(MeetingState({1, 0}, {2, 3}, {0, 2}));
  std::vector<int> blank(3, 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto o = env->Observe()[0];
    for (int b = 0; b < 3; ++b) blank[b] += o[b * 17 + 16] == 0.0f;
  }
  for (int b = 0; b < 3; ++b) EXPECT_NEAR(blank[b] / double(draws), 0.3, 0.02) << "block " << b;
}

TEST(MeetingTest, ImageLevelsAndDeterminism) {
  EnvConfig c = Quiet(EnvKind::kMeetingImage);
  auto env = MakeEnvironment(c);
  env->SetState(MeetingState({1, 0}, {2, 3}, {0, 2}));
  EXPECT_EQ(env->ObservationShape(), (std::vector<int>{1, 16, 16}));
  const auto a = env->Observe(), b = env->Observe();
  EXPECT_EQ(a, b);
  std::set<float> levels(a[0].begin(), a[0].end());
  EXPECT_EQ(levels, (std::set<float>{kEmptyLevel, kTargetLevel, kTeammateLevel, kSelfLevel}));
  // 4x4 grid in 16x16 pixels: self at cell (1, 0) covers pixels x 4..7, y 0..3.
  EXPECT_EQ(a[0][0 * 16 + 4], kSelfLevel);
  EXPECT_EQ(a[0][3 * 16 + 7], kSelfLevel);
  EXPECT_EQ(a[1][0 * 16 + 4], kTeammateLevel);
  EXPECT_EQ(a[0][8 * 16 + 0], kTargetLevel);
}

TEST(MeetingTest, ImageNoiseIsBounded) {
  EnvConfig clean_cfg = Quiet(EnvKind::kMeetingImage);
  EnvConfig noisy_cfg = clean_cfg;
  noisy_cfg.image_noise = 0.1;
  auto clean = MakeEnvironment(clean_cfg), noisy = MakeEnvironment(noisy_cfg);
  const GridState s = MeetingState({1, 0}, {2, 3}, {0, 2});
  clean->SetState(s);
  noisy->SetState(s);
  const auto ref = clean->Observe()[0];
  double max_dev = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto img = noisy->Observe()[0];
    for (std::size_t p = 0; p < img.size(); ++p) {
      ASSERT_GE(img[p], 0.0f);
      ASSERT_LE(img[p], 1.0f);
      max_dev = std::max(max_dev, std::abs(double(img[p]) - ref[p]));
    }
  }
  EXPECT_LE(max_dev, 0.1 + 1e-6);
  EXPECT_GT(max_dev, 0.05);
}

TEST(MeetingTest, ImageFlickerOmitsEntities) {
  EnvConfig c = Quiet(EnvKind::kMeetingImage);
  c.flicker = 1.0;
  auto env = MakeEnvironment(c);
  env->SetState(MeetingState({1, 0}, {2, 3}, {0, 2}));
  const auto img = env->Observe()[0];
  for (float v : img) ASSERT_EQ(v, kEmptyLevel);
}

TEST(MeetingTest, Errors) {
  auto env = MakeEnvironment(Quiet());
  env->Reset();
  EXPECT_THROW(Act(*env, 5, 0), std::invalid_argument);
  EXPECT_THROW(Act(*env, -1, 0), std::invalid_argument);
  const std::vector<int> one{0};
  EXPECT_THROW(env->Step(one), UsageError);
  EXPECT_THROW(env->SetState(MeetingState({4, 0}, {0, 0}, {1, 1})), ConfigError);
  EXPECT_THROW(env->SetState(MeetingState({0, 0}, {0, 1}, {1, 1}, 5)), ConfigError);

  EnvConfig bad = Quiet();
  bad.grid_size = 2;
  EXPECT_THROW(MakeEnvironment(bad), ConfigError);
  bad = Quiet();
  bad.flicker = 1.5;
  EXPECT_THROW(MakeEnvironment(bad), ConfigError);
  bad = Quiet(EnvKind::kMeetingImage);
  bad.grid_size = 5;
  EXPECT_THROW(MakeEnvironment(bad), ConfigError);
  EXPECT_THROW(ParseEnvKind("maze"), ConfigError);
  EXPECT_THROW(ParseCmotpVariant("wide"), ConfigError);
}

TEST(MeetingTest, RenderAscii) {
  auto env = MakeEnvironment(Quiet());
  env->SetState(MeetingState({1, 0}, {2, 3}, {0, 2}));
  EXPECT_EQ(env->RenderAscii(), ".A..\n....\nT...\n..B.\nstep 0\n");
}

TEST(MeetingTest, OracleSanity) {
  const testing::MeetingOracle oracle(3, 2, 0.0, true);
  // Both agents one step from a static target.
  EXPECT_EQ(oracle.Value(1, oracle.cell(0, 1), oracle.cell(2, 1), oracle.cell(1, 1)), 1.0);
  EXPECT_EQ(oracle.Action(1, oracle.cell(0, 1), oracle.cell(2, 1), oracle.cell(1, 1)),
            (std::array<int, 2>{kRight, kLeft}));
  // Two steps away cannot be closed in one.
  EXPECT_EQ(oracle.Value(1, oracle.cell(0, 0), oracle.cell(2, 1), oracle.cell(2, 2)), 0.0);
  EXPECT_EQ(oracle.Value(2, oracle.cell(0, 0), oracle.cell(2, 1), oracle.cell(1, 1)), 1.0);
}

TEST(MeetingTest, ScriptedOptimalPolicySucceedsWithoutNoise) {
  EnvConfig c;
  c.transition_noise = 0.0;
  c.flicker = 0.0;
  const testing::MeetingOracle oracle(4, 40, 0.0, false);
  EXPECT_GT(oracle.StartValue(), 0.9999);
  const harness::EvalResult r =
      harness::EvaluatePolicy(c, 5, 200, testing::OraclePolicy(oracle, 4, 40));
  EXPECT_EQ(r.mean_return, 1.0);
  EXPECT_LT(r.mean_length, 10.0);
}

// Exact success probability from the dynamic program against Monte Carlo
// rollouts of the environment under the same policy.
TEST(MeetingTest, NoisyDynamicsMatchOracle) {
  EnvConfig c;
  c.transition_noise = 0.1;
  c.grid_size = 3;
  c.episode_cap = 6;
  const testing::MeetingOracle oracle(3, 6, 0.1, false);
  const double p = oracle.StartValue();
  const int episodes = 20000;
  const harness::EvalResult r =
      harness::EvaluatePolicy(c, 77, episodes, testing::OraclePolicy(oracle, 3, 6));
  const double sigma = std::sqrt(p * (1 - p) / episodes);
  EXPECT_NEAR(r.mean_return, p, 4 * sigma) << "oracle " << p;
}

// CMOTP.

GridState Attached(const Environment& env, Cell box) {
  GridState s = env.state();
  s.box = box;
  s.agents = {Cell{box.x - 1, box.y}, Cell{box.x + 1, box.y}};
  s.attached = true;
  return s;
}

TEST(CmotpTest, ResetLayout) {
  auto env = MakeEnvironment(Quiet(EnvKind::kCmotp));
  env->Reset();
  const GridState& s = env->state();
  EXPECT_EQ(s.agents[0], (Cell{5, 14}));
  EXPECT_EQ(s.agents[1], (Cell{11, 14}));
  EXPECT_EQ(s.box, (Cell{8, 11}));
  EXPECT_FALSE(s.attached);
  EXPECT_EQ(s.step, 0);
  EXPECT_EQ(env->ObservationShape(), (std::vector<int>{1, 16, 16}));
  EXPECT_THROW(DefaultCmotpLayout(8, CmotpVariant::kOriginal), ConfigError);
}

TEST(CmotpTest, DifferentDirectionsDoNotMove) {
  auto env = MakeEnvironment(Quiet(EnvKind::kCmotp));
  env->Reset();
  env->SetState(Attached(*env, {8, 8}));
  const GridState before = env->state();
  Act(*env, kLeft, kRight);
  EXPECT_EQ(env->state().box, before.box);
  EXPECT_EQ(env->state().agents, before.agents);
  Act(*env, kUp, kStay);
  EXPECT_EQ(env->state().box, before.box);
  Act(*env, kStay, kStay);
  EXPECT_EQ(env->state().agents, before.agents);
}

TEST(CmotpTest, SameDirectionMovesTheBox) {
  auto env = MakeEnvironment(Quiet(EnvKind::kCmotp));
  env->Reset();
  env->SetState(Attached(*env, {8, 8}));
  Act(*env, kDown, kDown);
  EXPECT_EQ(env->state().box, (Cell{8, 9}));
  EXPECT_EQ(env->state().agents[0], (Cell{7, 9}));
  EXPECT_EQ(env->state().agents[1], (Cell{9, 9}));
  Act(*env, kLeft, kLeft);
  EXPECT_EQ(env->state().box, (Cell{7, 9}));
  EXPECT_EQ(env->state().agents[0], (Cell{6, 9}));
}

TEST(CmotpTest, ObstaclesBlockTheCompound) {
  auto env = MakeEnvironment(Quiet(EnvKind::kCmotp));
  env->Reset();
  GridState s = Attached(*env, {8, 8});
  s.obstacles[9 * 16 + 9] = 1;  // below agent 1
  env->SetState(s);
  Act(*env, kDown, kDown);
  EXPECT_EQ(env->state().box, (Cell{8, 8}));
  // The grid edge blocks as well.
  s = Attached(*env, {8, 15});
  s.obstacles[9 * 16 + 9] = 0;
  env->SetState(s);
  Act(*env, kDown, kDown);
  EXPECT_EQ(env->state().box, (Cell{8, 15}));
}

TEST(CmotpTest, DetachedMovementRules) {
  auto env = MakeEnvironment(Quiet(EnvKind::kCmotp));
  env->Reset();
  GridState s = env->state();
  // The box blocks.
  s.agents = {Cell{8, 12}, Cell{0, 0}};
  s.obstacles[0 * 16 + 1] = 1;
  env->SetState(s);
  Act(*env, kUp, kRight);  // into the box / into an obstacle
  EXPECT_EQ(env->state().agents[0], (Cell{8, 12}));
  EXPECT_EQ(env->state().agents[1], (Cell{0, 0}));
  // Same destination: both stay.
  s = env->state();
  s.obstacles[1] = 0;
  s.agents = {Cell{2, 2}, Cell{4, 2}};
  env->SetState(s);
  Act(*env, kRight, kLeft);
  EXPECT_EQ(env->state().agents[0], (Cell{2, 2}));
  EXPECT_EQ(env->state().agents[1], (Cell{4, 2}));
  // Swap: both stay.
  s.agents = {Cell{2, 2}, Cell{3, 2}};
  env->SetState(s);
  Act(*env, kRight, kLeft);
  EXPECT_EQ(env->state().agents[0], (Cell{2, 2}));
  EXPECT_EQ(env->state().agents[1], (Cell{3, 2}));
  // Into a teammate that stays put: blocked.
  Act(*env, kRight, kStay);
  EXPECT_EQ(env->state().agents[0], (Cell{2, 2}));
  // Following a teammate that moves away: allowed.
  Act(*env, kRight, kRight);
  EXPECT_EQ(env->state().agents[0], (Cell{3, 2}));
  EXPECT_EQ(env->state().agents[1], (Cell{4, 2}));
}

TEST(CmotpTest, PickupAttaches) {
  auto env = MakeEnvironment(Quiet(EnvKind::kCmotp));
  env->Reset();
  GridState s = env->state();
  s.agents = {Cell{7, 12}, Cell{9, 11}};
  env->SetState(s);
  Act(*env, kUp, kStay);
  EXPECT_TRUE(env->state().attached);
}

TEST(CmotpTest, DeliveryPaysAndTerminates) {
  auto env = MakeEnvironment(Quiet(EnvKind::kCmotp));
  env->Reset();
  env->SetState(Attached(*env, {8, 1}));
  const JointStep step = Act(*env, kUp, kUp);
  EXPECT_TRUE(step.terminal);
  EXPECT_EQ(step.reward, 1.0);
  // Row 0 outside the zone is not a delivery.
  env->SetState(Attached(*env, {2, 1}));
  const JointStep miss = Act(*env, kUp, kUp);
  EXPECT_FALSE(miss.terminal);
  EXPECT_EQ(env->state().box, (Cell{2, 0}));
}

TEST(CmotpTest, StochasticZoneFrequencies) {
  EnvConfig c = Quiet(EnvKind::kCmotp);
  c.cmotp_variant = CmotpVariant::kStochasticReward;
  c.seed = 31;
  auto env = MakeEnvironment(c);
  env->Reset();
  auto* cmotp = static_cast<Cmotp*>(env.get());
  ASSERT_EQ(cmotp->drop_zones().size(), 2u);
  EXPECT_NEAR(cmotp->drop_zones()[1].expectation(), 0.76, 1e-12);
  const int trials = 10000;
  double sum_b = 0.0, sum_a = 0.0;
  int high = 0;
  for (int i = 0; i < trials; ++i) {
    env->SetState(Attached(*env, {12, 1}));
    const JointStep b = Act(*env, kUp, kUp);
    ASSERT_TRUE(b.terminal);
    ASSERT_TRUE(b.reward == 1.0 || b.reward == 0.4);
    sum_b += b.reward;
    high += b.reward == 1.0;
    env->SetState(Attached(*env, {2, 1}));
    const JointStep a = Act(*env, kUp, kUp);
    ASSERT_TRUE(a.terminal);
    sum_a += a.reward;
  }
  EXPECT_NEAR(sum_b / trials, 0.76, 0.02);
  EXPECT_NEAR(high / double(trials), 0.6, 0.02);
  EXPECT_NEAR(sum_a / trials, 0.8, 1e-12);
}

TEST(CmotpTest, NarrowPassageWall) {
  EnvConfig c = Quiet(EnvKind::kCmotp);
  c.cmotp_variant = CmotpVariant::kNarrowPassage;
  auto env = MakeEnvironment(c);
  env->Reset();
  const auto& obstacles = env->state().obstacles;
  for (int x = 0; x < 16; ++x) {
    EXPECT_EQ(obstacles[6 * 16 + x], (x >= 7 && x <= 9) ? 0 : 1) << "x " << x;
  }
  // Shifted one column the compound cannot pass the wall.
  env->SetState(Attached(*env, {9, 7}));
  Act(*env, kUp, kUp);
  EXPECT_EQ(env->state().box, (Cell{9, 7}));
  env->SetState(Attached(*env, {8, 7}));
  Act(*env, kUp, kUp);
  EXPECT_EQ(env->state().box, (Cell{8, 6}));
  // Obstacles are visible in the image.
  const auto img = env->Observe()[0];
  EXPECT_EQ(img[6 * 16 + 0], kObstacleLevel);
}

harness::JointAction CarryUp(const Environment& env, Rng&) {
  const GridState& s = env.state();
  if (s.attached) return {kUp, kUp};
  const Cell goals[2] = {{s.box.x - 1, s.box.y}, {s.box.x + 1, s.box.y}};
  harness::JointAction out{};
  for (int a = 0; a < 2; ++a) {
    const Cell p = s.agents[a];
    if (p.x != goals[a].x) out[a] = p.x < goals[a].x ? kRight : kLeft;
    else if (p.y != goals[a].y) out[a] = p.y < goals[a].y ? kDown : kUp;
    else out[a] = kStay;
  }
  return out;
}

TEST(CmotpTest, ScriptedCarryDelivers) {
  for (auto variant : {CmotpVariant::kOriginal, CmotpVariant::kNarrowPassage}) {
    EnvConfig c = Quiet(EnvKind::kCmotp);
    c.cmotp_variant = variant;
    const harness::EvalResult r = harness::EvaluatePolicy(c, 1, 5, CarryUp);
    EXPECT_EQ(r.mean_return, 1.0) << CmotpVariantName(variant);
    EXPECT_EQ(r.mean_length, 16.0);
  }
}

TEST(CmotpTest, RandomRolloutInvariants) {
  for (auto variant : {CmotpVariant::kOriginal, CmotpVariant::kNarrowPassage,
                       CmotpVariant::kStochasticReward}) {
    EnvConfig c;
    c.kind = EnvKind::kCmotp;
    c.grid_size = 12;
    c.image_size = 12;
    c.episode_cap = 60;
    c.cmotp_variant = variant;
    c.seed = 3;
    auto env = MakeEnvironment(c);
    Rng rng(8);
    for (int episode = 0; episode < 50; ++episode) {
      env->Reset();
      for (;;) {
        const JointStep step = Act(*env, static_cast<int>(UniformIndex(rng, 5)),
                                   static_cast<int>(UniformIndex(rng, 5)));
        const GridState& s = env->state();
        for (const Cell& p : {s.agents[0], s.agents[1], s.box}) {
          ASSERT_TRUE(p.x >= 0 && p.y >= 0 && p.x < 12 && p.y < 12);
          ASSERT_EQ(s.obstacles[p.y * 12 + p.x], 0);
        }
        ASSERT_NE(s.agents[0], s.agents[1]);
        ASSERT_NE(s.agents[0], s.box);
        ASSERT_NE(s.agents[1], s.box);
        ASSERT_LE(s.step, 60);
        if (step.terminal) break;
      }
    }
  }
}

TEST(CmotpTest, SeededRolloutsRepeat) {
  EnvConfig c;
  c.kind = EnvKind::kCmotp;
  c.grid_size = 16;
  c.seed = 21;
  auto a = MakeEnvironment(c), b = MakeEnvironment(c);
  EXPECT_EQ(a->Reset(), b->Reset());
  Rng rng(1);
  for (int t = 0; t < 30; ++t) {
    const int x = static_cast<int>(UniformIndex(rng, 5));
    const int y = static_cast<int>(UniformIndex(rng, 5));
    const JointStep sa = Act(*a, x, y), sb = Act(*b, x, y);
    ASSERT_EQ(sa.observations, sb.observations);
    ASSERT_EQ(a->state(), b->state());
  }
}

}  // namespace
}  // namespace lhiqn::env
