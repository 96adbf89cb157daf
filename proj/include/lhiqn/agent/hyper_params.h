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

#ifndef LHIQN_AGENT_HYPER_PARAMS_H_
#define LHIQN_AGENT_HYPER_PARAMS_H_

#include <string>
#include <vector>

#include "lhiqn/dist/distortion.h"

namespace lhiqn::agent {

enum class Algorithm { kIqn, kHIqn, kLIqn, kLhIqn, kDqn, kHDqn };

// "iqn", "h-iqn", "l-iqn", "lh-iqn", "dqn", "hdqn". Throws ConfigError.
Algorithm ParseAlgorithm(const std::string& name);
std::string AlgorithmName(Algorithm algorithm);

struct AgentVariant {
  Algorithm algorithm = Algorithm::kLhIqn;
  bool recurrent = true;

  bool is_quantile() const;
  bool uses_tdl() const;         // L and LH
  bool uses_hysteresis() const;  // H, LH and HDQN
  // Display name, e.g. "LH-IRQN" or "HDRQN".
  std::string DisplayName() const;
};

// Linear anneal from `start` to `end` over `steps`, constant afterwards.
struct LinearSchedule {
  double start = 1.0;
  double end = 0.1;
  long steps = 200000;

  double Value(long step) const;
};

enum class EtaMode { kTiedToEpsilon, kLinear };

struct ScheduleValues {
  double epsilon = 1.0;
  double eta = 1.0;
};

struct HyperParams {
  AgentVariant variant;

  double beta = 0.4;
  double gamma = 0.95;
  double learning_rate = 0.001;
  double kappa = 1.0;

  int n = 16;        // tau samples per loss
  int n_prime = 16;  // tau' samples per loss
  int m = 16;        // TDL distribution samples, taken from the first m of n
  int m_prime = 16;  // TDL target samples, taken from the first m' of n'
  int k = 16;        // distorted levels per action choice
  bool renormalize_tdl = false;

  long target_period = 1000;  // training steps between target syncs
  int batch_size = 32;
  int trace_length = 4;  // forced to 1 for feed-forward variants

  LinearSchedule epsilon;
  EtaMode eta_mode = EtaMode::kTiedToEpsilon;
  LinearSchedule eta;
  dist::DistortionKind distortion = dist::DistortionKind::kIdentity;
  bool literal_cvnar = false;

  // Network shape.
  std::vector<int> trunk = {32, 64};
  int lstm_cells = 64;
  int embedding_n = 64;
  std::vector<int> head = {32};
  std::vector<int> conv_kernels = {32, 64};
  std::vector<int> conv_kernel_sizes = {3, 3};
  std::vector<int> conv_strides = {2, 1};
  int conv_dense = 1024;
  bool double_precision = false;

  // Throws ConfigError.
  void Validate() const;

  ScheduleValues Schedule(long step) const;
  int effective_trace_length() const { return variant.recurrent ? trace_length : 1; }
};

// Learning-rate multiplier for one sampled error u = target - estimate:
// 1 when u > 0; otherwise beta (H), tdl (L), max(beta, tdl) (LH) or 1.
double HystereticWeight(double td_error, double tdl, Algorithm algorithm, double beta);

}  // namespace lhiqn::agent

#endif  // LHIQN_AGENT_HYPER_PARAMS_H_
