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

#include "lhiqn/agent/learner.h"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "lhiqn/dist/piecewise_cdf.h"
#include "lhiqn/dist/quantile.h"
#include "lhiqn/errors.h"
#include "lhiqn/nn/adam.h"

namespace lhiqn::agent {

namespace {

// Index of the largest entry of row `r` averaged over `count` consecutive
// rows starting at r * count; lowest index wins ties.
template <typename T>
int ArgmaxMean(const nn::NumArray<T>& out, int r, int count, int num_actions) {
  int best = 0;
  double best_value = 0.0;
  for (int a = 0; a < num_actions; ++a) {
    double sum = 0.0;
    for (int k = 0; k < count; ++k) sum += out.at(r * count + k, a);
    const double mean = sum / count;
    if (a == 0 || mean > best_value) {
      best = a;
      best_value = mean;
    }
  }
  return best;
}

}  // namespace

double SampledTdl(std::span<const double> dist_taus, std::span<const double> dist_values,
                  std::span<const double> target_taus, std::span<const double> target_values,
                  int m, int m_prime, bool renormalize) {
  const dist::QuantileSampleSet d(dist_taus.first(m), dist_values.first(m));
  const dist::QuantileSampleSet t(target_taus.first(m_prime), target_values.first(m_prime));
  return dist::Tdl(d, t, dist::TdlOptions{renormalize});
}

nn::NetworkSpec MakeNetworkSpec(const HyperParams& params, const std::vector<int>& obs_shape,
                                int num_actions) {
  const int embedding = params.variant.is_quantile() ? params.embedding_n : 0;
  const int lstm = params.variant.recurrent ? params.lstm_cells : 0;
  if (obs_shape.size() == 3) {
    nn::ConvOptions conv;
    conv.kernels = params.conv_kernels;
    conv.kernel_sizes = params.conv_kernel_sizes;
    conv.strides = params.conv_strides;
    conv.trunk_dense = params.conv_dense;
    conv.lstm_cells = lstm;
    conv.embedding_n = embedding;
    conv.head = params.head;
    return nn::MakeConvSpec(obs_shape[0], obs_shape[1], obs_shape[2], num_actions, conv);
  }
  if (obs_shape.size() != 1) {
    throw ConfigError("agent: observations must be vectors or (channels, height, width)");
  }
  nn::MlpOptions mlp;
  mlp.trunk = params.trunk;
  mlp.lstm_cells = lstm;
  mlp.embedding_n = embedding;
  mlp.head = params.head;
  return nn::MakeMlpSpec(obs_shape[0], num_actions, mlp);
}

template <typename T>
LearnerImpl<T>::LearnerImpl(const HyperParams& params, const std::vector<int>& obs_shape,
                            int num_actions, std::uint64_t init_seed,
                            std::uint64_t train_seed)
    : params_(params),
      num_actions_(num_actions),
      obs_shape_(obs_shape),
      main_(MakeNetworkSpec(params, obs_shape, num_actions)),
      target_(main_.spec()),
      rng_(train_seed) {
  params_.Validate();
  Rng init(init_seed);
  main_.Init(init);
  nn::SyncTarget(main_, target_);
  BeginEpisode(kTrainSlot);
  BeginEpisode(kEvalSlot);
}

template <typename T>
void LearnerImpl<T>::BeginEpisode(int slot) {
  acting_state_.at(slot) = main_.ZeroState(1);
}

template <typename T>
nn::NumArray<T> LearnerImpl<T>::DrawTaus(int count) {
  nn::NumArray<T> taus({count, 1});
  for (int i = 0; i < count; ++i) taus[i] = static_cast<T>(Uniform01(rng_));
  return taus;
}

template <typename T>
int LearnerImpl<T>::Act(int slot, std::span<const float> observation, double epsilon,
                        const dist::DistortionOperator& distortion, Rng& rng) {
  if (static_cast<int>(observation.size()) != main_.spec().observation_size()) {
    throw ConfigError("agent: observation size " + std::to_string(observation.size()) +
                      " does not match the network");
  }
  const bool explore = epsilon > 0.0 && Uniform01(rng) < epsilon;
  if (explore && !params_.variant.recurrent) {
    return static_cast<int>(UniformIndex(rng, num_actions_));
  }
  std::vector<int> shape = {1};
  shape.insert(shape.end(), obs_shape_.begin(), obs_shape_.end());
  nn::NumArray<T> obs(shape, std::vector<T>(observation.begin(), observation.end()));
  nn::NumArray<T> taus;
  int count = 1;
  if (params_.variant.is_quantile()) {
    count = params_.k;
    taus = nn::NumArray<T>({count, 1});
    for (int i = 0; i < count; ++i) taus[i] = static_cast<T>(Distort(distortion, Uniform01(rng)));
  }
  const auto& out = main_.Forward(obs, 1, taus, &acting_state_.at(slot));
  if (explore) return static_cast<int>(UniformIndex(rng, num_actions_));
  return ArgmaxMean(out, 0, count, num_actions_);
}

template <typename T>
void LearnerImpl<T>::BuildInputs(std::span<const replay::Trace> batch, nn::NumArray<T>* obs,
                                 nn::NumArray<T>* next_obs) const {
  const int b_count = static_cast<int>(batch.size());
  const int steps = batch.front().length();
  const int size = main_.spec().observation_size();
  std::vector<int> shape = {steps * b_count};
  shape.insert(shape.end(), obs_shape_.begin(), obs_shape_.end());
  *obs = nn::NumArray<T>(shape);
  *next_obs = nn::NumArray<T>(shape);
  for (int t = 0; t < steps; ++t) {
    for (int b = 0; b < b_count; ++b) {
      const replay::Transition& tr = batch[b].steps[t];
      if (static_cast<int>(tr.observation.size()) != size ||
          static_cast<int>(tr.next_observation.size()) != size) {
        throw ConfigError("agent: replayed observation has the wrong size");
      }
      const std::size_t row = static_cast<std::size_t>(t * b_count + b) * size;
      std::copy(tr.observation.begin(), tr.observation.end(), obs->data() + row);
      std::copy(tr.next_observation.begin(), tr.next_observation.end(),
                next_obs->data() + row);
    }
  }
}

template <typename T>
double LearnerImpl<T>::Train(std::span<const replay::Trace> batch) {
  if (batch.empty()) throw std::invalid_argument("agent: empty training batch");
  for (const replay::Trace& trace : batch) {
    if (trace.length() != batch.front().length()) {
      throw std::invalid_argument("agent: traces in one batch differ in length");
    }
  }
  return params_.variant.is_quantile() ? TrainQuantile(batch) : TrainBaseline(batch);
}

template <typename T>
double LearnerImpl<T>::TrainQuantile(std::span<const replay::Trace> batch) {
  const int b_count = static_cast<int>(batch.size());
  const int steps = batch.front().length();
  const int rows = steps * b_count;
  const int n = params_.n, n_prime = params_.n_prime;
  nn::NumArray<T> obs, next_obs;
  BuildInputs(batch, &obs, &next_obs);
  nn::NumArray<T> taus = DrawTaus(rows * n);
  nn::NumArray<T> target_taus = DrawTaus(rows * n_prime);

  const nn::NumArray<T> target_out = target_.Forward(next_obs, steps, target_taus);
  const nn::NumArray<T>& out = main_.Forward(obs, steps, taus);
  nn::NumArray<T> grad(out.shape());

  const Algorithm algorithm = force_unit_weights_ ? Algorithm::kIqn : params_.variant.algorithm;
  std::vector<double> d(n), d_taus(n), y(n_prime), y_taus(n_prime);
  double loss = 0.0;
  int valid = 0;
  for (int t = 0; t < steps; ++t) {
    for (int b = 0; b < b_count; ++b) {
      if (!batch[b].valid[t]) continue;
      ++valid;
      const replay::Transition& tr = batch[b].steps[t];
      const int r = t * b_count + b;
      const int best = ArgmaxMean(target_out, r, n_prime, num_actions_);
      for (int j = 0; j < n_prime; ++j) {
        const double bootstrap = tr.terminal ? 0.0 : target_out.at(r * n_prime + j, best);
        y[j] = tr.reward + params_.gamma * bootstrap;
        y_taus[j] = target_taus[r * n_prime + j];
      }
      for (int i = 0; i < n; ++i) {
        d[i] = out.at(r * n + i, tr.action);
        d_taus[i] = taus[r * n + i];
      }
      double tdl = 0.0;
      if (params_.variant.uses_tdl()) {
        tdl = SampledTdl(d_taus, d, y_taus, y, params_.m, params_.m_prime,
                         params_.renormalize_tdl);
        stats_.tdl_sum += tdl;
        ++stats_.transitions;
      }
      for (int i = 0; i < n; ++i) {
        double g = 0.0;
        for (int j = 0; j < n_prime; ++j) {
          const double u = y[j] - d[i];
          const double w = HystereticWeight(u, tdl, algorithm, params_.beta);
          if (u <= 0.0) {
            ++stats_.negative_cells;
            if (tdl > params_.beta) ++stats_.usage_cells;
          }
          loss += w * dist::QuantileHuber(u, d_taus[i], params_.kappa);
          g -= w * dist::QuantileHuberDerivative(u, d_taus[i], params_.kappa);
        }
        grad.at(r * n + i, tr.action) = static_cast<T>(g / n_prime);
      }
    }
  }
  if (valid == 0) return 0.0;
  loss /= static_cast<double>(n_prime) * valid;
  if (!std::isfinite(loss)) {
    throw NumericError("agent: non-finite loss at train step " + std::to_string(train_steps_));
  }
  for (T& g : grad.storage()) g /= static_cast<T>(valid);
  main_.Backward(grad);
  FinishStep();
  return loss;
}

template <typename T>
double LearnerImpl<T>::TrainBaseline(std::span<const replay::Trace> batch) {
  const int b_count = static_cast<int>(batch.size());
  const int steps = batch.front().length();
  nn::NumArray<T> obs, next_obs;
  BuildInputs(batch, &obs, &next_obs);
  const nn::NumArray<T> none;
  const nn::NumArray<T> target_out = target_.Forward(next_obs, steps, none);
  const nn::NumArray<T>& out = main_.Forward(obs, steps, none);
  nn::NumArray<T> grad(out.shape());
  const Algorithm algorithm = force_unit_weights_ ? Algorithm::kDqn : params_.variant.algorithm;
  double loss = 0.0;
  int valid = 0;
  for (int t = 0; t < steps; ++t) {
    for (int b = 0; b < b_count; ++b) {
      if (!batch[b].valid[t]) continue;
      ++valid;
      const replay::Transition& tr = batch[b].steps[t];
      const int r = t * b_count + b;
      double target = tr.reward;
      if (!tr.terminal) {
        double best = target_out.at(r, 0);
        for (int a = 1; a < num_actions_; ++a) best = std::max<double>(best, target_out.at(r, a));
        target += params_.gamma * best;
      }
      const double u = target - out.at(r, tr.action);
      const double w = HystereticWeight(u, 0.0, algorithm, params_.beta);
      loss += w * u * u;
      grad.at(r, tr.action) = static_cast<T>(-2.0 * w * u);
    }
  }
  if (valid == 0) return 0.0;
  loss /= valid;
  if (!std::isfinite(loss)) {
    throw NumericError("agent: non-finite loss at train step " + std::to_string(train_steps_));
  }
  for (T& g : grad.storage()) g /= static_cast<T>(valid);
  main_.Backward(grad);
  FinishStep();
  return loss;
}

template <typename T>
void LearnerImpl<T>::FinishStep() {
  auto params = main_.Params();
  nn::AdamStep<T>(params, params_.learning_rate);
  ++train_steps_;
  if (train_steps_ % params_.target_period == 0) nn::SyncTarget(main_, target_);
}

template <typename T>
double LearnerImpl<T>::TransitionTdl(const replay::Transition& transition) {
  if (!params_.variant.is_quantile()) {
    throw UnsupportedOperation("agent: TDL needs a quantile variant, not " +
                               params_.variant.DisplayName());
  }
  const int n = params_.n, n_prime = params_.n_prime;
  const int m = std::min(params_.m, n), m_prime = std::min(params_.m_prime, n_prime);
  std::vector<int> shape = {1};
  shape.insert(shape.end(), obs_shape_.begin(), obs_shape_.end());
  nn::NumArray<T> obs(shape, std::vector<T>(transition.observation.begin(),
                                            transition.observation.end()));
  nn::NumArray<T> next(shape, std::vector<T>(transition.next_observation.begin(),
                                             transition.next_observation.end()));
  nn::NumArray<T> taus = DrawTaus(n);
  nn::NumArray<T> target_taus = DrawTaus(n_prime);
  const nn::NumArray<T> target_out = target_.Forward(next, 1, target_taus);
  const nn::NumArray<T>& out = main_.Forward(obs, 1, taus);
  const int best = ArgmaxMean(target_out, 0, n_prime, num_actions_);
  std::vector<double> d(n), d_taus(n), y(n_prime), y_taus(n_prime);
  for (int i = 0; i < n; ++i) {
    d[i] = out.at(i, transition.action);
    d_taus[i] = taus[i];
  }
  for (int j = 0; j < n_prime; ++j) {
    const double bootstrap = transition.terminal ? 0.0 : target_out.at(j, best);
    y[j] = transition.reward + params_.gamma * bootstrap;
    y_taus[j] = target_taus[j];
  }
  return SampledTdl(d_taus, d, y_taus, y, m, m_prime, params_.renormalize_tdl);
}

template <typename T>
std::vector<double> LearnerImpl<T>::Evaluate(std::span<const float> observation,
                                             std::span<const double> taus) {
  std::vector<int> shape = {1};
  shape.insert(shape.end(), obs_shape_.begin(), obs_shape_.end());
  nn::NumArray<T> obs(shape, std::vector<T>(observation.begin(), observation.end()));
  nn::NumArray<T> levels;
  if (params_.variant.is_quantile()) {
    if (taus.empty()) throw std::invalid_argument("agent: Evaluate needs quantile levels");
    levels = nn::NumArray<T>({static_cast<int>(taus.size()), 1},
                             std::vector<T>(taus.begin(), taus.end()));
  }
  const auto& out = main_.Forward(obs, 1, levels);
  return std::vector<double>(out.storage().begin(), out.storage().end());
}

template <typename T>
TdlStats LearnerImpl<T>::TakeStats() {
  TdlStats out = stats_;
  stats_ = TdlStats{};
  return out;
}

template <typename T>
void LearnerImpl<T>::Save(std::ostream& out) {
  out << "learner " << params_.variant.DisplayName() << " " << train_steps_ << "\n";
  main_.Save(out);
  target_.Save(out);
}

template <typename T>
void LearnerImpl<T>::Load(std::istream& in) {
  std::string word, name;
  long steps = 0;
  if (!(in >> word >> name >> steps) || word != "learner") {
    throw InputError("checkpoint: expected a learner record");
  }
  if (name != params_.variant.DisplayName()) {
    throw InputError("checkpoint: learner is " + name + ", config says " +
                     params_.variant.DisplayName());
  }
  main_.Load(in);
  target_.Load(in);
  train_steps_ = steps;
}

template class LearnerImpl<float>;
template class LearnerImpl<double>;

std::unique_ptr<Learner> MakeLearner(const HyperParams& params,
                                     const std::vector<int>& obs_shape, int num_actions,
                                     std::uint64_t init_seed, std::uint64_t train_seed) {
  if (params.double_precision) {
    return std::make_unique<LearnerImpl<double>>(params, obs_shape, num_actions, init_seed,
                                                 train_seed);
  }
  return std::make_unique<LearnerImpl<float>>(params, obs_shape, num_actions, init_seed,
                                              train_seed);
}

}  // namespace lhiqn::agent
