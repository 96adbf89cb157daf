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

#ifndef LHIQN_AGENT_LEARNER_H_
#define LHIQN_AGENT_LEARNER_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "lhiqn/agent/hyper_params.h"
#include "lhiqn/dist/distortion.h"
#include "lhiqn/nn/network.h"
#include "lhiqn/replay/cert_buffer.h"
#include "lhiqn/rng.h"

namespace lhiqn::agent {

// Acting keeps separate recurrent state per slot so an evaluation rollout
// can interrupt a training episode.
inline constexpr int kTrainSlot = 0;
inline constexpr int kEvalSlot = 1;

// TDL diagnostics accumulated over training steps.
struct TdlStats {
  double tdl_sum = 0.0;
  long transitions = 0;
  long negative_cells = 0;  // cells with u <= 0
  long usage_cells = 0;     // of those, cells whose transition had tdl > beta

  double mean_tdl() const { return transitions ? tdl_sum / transitions : 0.0; }
  double usage() const {
    return negative_cells ? static_cast<double>(usage_cells) / negative_cells : 0.0;
  }
};

// TDL of one transition from already drawn samples: the first m distribution
// samples against the first m' target samples.
double SampledTdl(std::span<const double> dist_taus, std::span<const double> dist_values,
                  std::span<const double> target_taus, std::span<const double> target_values,
                  int m, int m_prime, bool renormalize);

nn::NetworkSpec MakeNetworkSpec(const HyperParams& params, const std::vector<int>& obs_shape,
                                int num_actions);

// An independent learner: main and target networks, Adam state and the
// acting state of one agent. Not thread-safe.
class Learner {
 public:
  virtual ~Learner() = default;

  virtual const HyperParams& params() const = 0;
  virtual int num_actions() const = 0;

  // Clears the recurrent acting state of `slot`.
  virtual void BeginEpisode(int slot) = 0;
  // Epsilon-greedy on the mean of k distorted quantile estimates (plain Q
  // values for DQN variants); ties go to the lowest action index. Recurrent
  // learners advance their state even on exploratory steps.
  virtual int Act(int slot, std::span<const float> observation, double epsilon,
                  const dist::DistortionOperator& distortion, Rng& rng) = 0;

  // One gradient step on a batch of traces (one per batch element); returns
  // the weighted loss averaged over valid steps. Throws NumericError.
  virtual double Train(std::span<const replay::Trace> batch) = 0;

  // TDL of a single transition under fresh tau draws, zero recurrent state.
  // Throws UnsupportedOperation for DQN variants.
  virtual double TransitionTdl(const replay::Transition& transition) = 0;

  // Main-network outputs for one observation at the given levels
  // (row-major, taus.size() x num_actions; one row for DQN variants).
  virtual std::vector<double> Evaluate(std::span<const float> observation,
                                       std::span<const double> taus) = 0;

  virtual TdlStats TakeStats() = 0;
  virtual long train_steps() const = 0;

  virtual void Save(std::ostream& out) = 0;
  virtual void Load(std::istream& in) = 0;
};

template <typename T>
class LearnerImpl : public Learner {
 public:
  LearnerImpl(const HyperParams& params, const std::vector<int>& obs_shape, int num_actions,
              std::uint64_t init_seed, std::uint64_t train_seed);

  const HyperParams& params() const override { return params_; }
  int num_actions() const override { return num_actions_; }

  void BeginEpisode(int slot) override;
  int Act(int slot, std::span<const float> observation, double epsilon,
          const dist::DistortionOperator& distortion, Rng& rng) override;
  double Train(std::span<const replay::Trace> batch) override;
  double TransitionTdl(const replay::Transition& transition) override;
  std::vector<double> Evaluate(std::span<const float> observation,
                               std::span<const double> taus) override;
  TdlStats TakeStats() override;
  long train_steps() const override { return train_steps_; }
  void Save(std::ostream& out) override;
  void Load(std::istream& in) override;

  nn::Network<T>& main_network() { return main_; }
  nn::Network<T>& target_network() { return target_; }
  Rng& train_rng() { return rng_; }
  // Every cell weight 1 regardless of variant (reference path in tests).
  void set_force_unit_weights(bool on) { force_unit_weights_ = on; }

 private:
  double TrainQuantile(std::span<const replay::Trace> batch);
  double TrainBaseline(std::span<const replay::Trace> batch);
  void BuildInputs(std::span<const replay::Trace> batch, nn::NumArray<T>* obs,
                   nn::NumArray<T>* next_obs) const;
  nn::NumArray<T> DrawTaus(int count);
  void FinishStep();

  HyperParams params_;
  int num_actions_;
  std::vector<int> obs_shape_;
  nn::Network<T> main_;
  nn::Network<T> target_;
  Rng rng_;
  std::array<nn::RecurrentState<T>, 2> acting_state_;
  long train_steps_ = 0;
  TdlStats stats_;
  bool force_unit_weights_ = false;
};

// Picks the precision from params.double_precision. Throws ConfigError.
std::unique_ptr<Learner> MakeLearner(const HyperParams& params,
                                     const std::vector<int>& obs_shape, int num_actions,
                                     std::uint64_t init_seed, std::uint64_t train_seed);

}  // namespace lhiqn::agent

#endif  // LHIQN_AGENT_LEARNER_H_
