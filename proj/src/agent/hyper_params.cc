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

#include "lhiqn/agent/hyper_params.h"

#include <algorithm>

#include "lhiqn/errors.h"

namespace lhiqn::agent {

Algorithm ParseAlgorithm(const std::string& name) {
  if (name == "iqn") return Algorithm::kIqn;
  if (name == "h-iqn") return Algorithm::kHIqn;
  if (name == "l-iqn") return Algorithm::kLIqn;
  if (name == "lh-iqn") return Algorithm::kLhIqn;
  if (name == "dqn") return Algorithm::kDqn;
  if (name == "hdqn") return Algorithm::kHDqn;
  throw ConfigError("unknown algorithm '" + name +
                    "' (expected iqn, h-iqn, l-iqn, lh-iqn, dqn or hdqn)");
}

std::string AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kIqn: return "iqn";
    case Algorithm::kHIqn: return "h-iqn";
    case Algorithm::kLIqn: return "l-iqn";
    case Algorithm::kLhIqn: return "lh-iqn";
    case Algorithm::kDqn: return "dqn";
    case Algorithm::kHDqn: return "hdqn";
  }
  return "iqn";
}

bool AgentVariant::is_quantile() const {
  return algorithm != Algorithm::kDqn && algorithm != Algorithm::kHDqn;
}

bool AgentVariant::uses_tdl() const {
  return algorithm == Algorithm::kLIqn || algorithm == Algorithm::kLhIqn;
}

bool AgentVariant::uses_hysteresis() const {
  return algorithm == Algorithm::kHIqn || algorithm == Algorithm::kLhIqn ||
         algorithm == Algorithm::kHDqn;
}

std::string AgentVariant::DisplayName() const {
  const char* r = recurrent ? "R" : "";
  switch (algorithm) {
    case Algorithm::kIqn: return std::string("I") + r + "QN";
    case Algorithm::kHIqn: return std::string("H-I") + r + "QN";
    case Algorithm::kLIqn: return std::string("L-I") + r + "QN";
    case Algorithm::kLhIqn: return std::string("LH-I") + r + "QN";
    case Algorithm::kDqn: return std::string("D") + r + "QN";
    case Algorithm::kHDqn: return std::string("HD") + r + "QN";
  }
  return "?";
}

double LinearSchedule::Value(long step) const {
  if (steps <= 0 || step >= steps) return end;
  if (step <= 0) return start;
  return start + (end - start) * static_cast<double>(step) / static_cast<double>(steps);
}

ScheduleValues HyperParams::Schedule(long step) const {
  ScheduleValues v;
  v.epsilon = epsilon.Value(step);
  v.eta = eta_mode == EtaMode::kTiedToEpsilon ? v.epsilon : eta.Value(step);
  return v;
}

void HyperParams::Validate() const {
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("agent: beta must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("agent: gamma must lie in [0, 1]");
  if (!(learning_rate >= 0.0)) throw ConfigError("agent: learning_rate must be >= 0");
  if (!(kappa > 0.0)) throw ConfigError("agent: kappa must be > 0");
  if (n < 1 || n_prime < 1 || k < 1 || m_prime < 1) {
    throw ConfigError("agent: n, n_prime, m_prime and k must be >= 1");
  }
  if (variant.uses_tdl() && m < 2) throw ConfigError("agent: TDL needs m >= 2");
  if (variant.uses_tdl() && (m > n || m_prime > n_prime)) {
    throw ConfigError("agent: TDL reuses loss samples, so m <= n and m_prime <= n_prime");
  }
  if (target_period < 1) throw ConfigError("agent: target_period must be >= 1");
  if (batch_size < 1) throw ConfigError("agent: batch_size must be >= 1");
  if (trace_length < 1) throw ConfigError("agent: trace_length must be >= 1");
  for (const LinearSchedule* s : {&epsilon, &eta}) {
    if (!(s->start >= 0.0 && s->start <= 1.0 && s->end >= 0.0 && s->end <= 1.0)) {
      throw ConfigError("agent: schedule values must lie in [0, 1]");
    }
  }
  if (variant.is_quantile() && embedding_n < 1) {
    throw ConfigError("agent: quantile variants need embedding_n >= 1");
  }
  if (variant.recurrent && lstm_cells < 1) {
    throw ConfigError("agent: recurrent variants need lstm_cells >= 1");
  }
}

double HystereticWeight(double td_error, double tdl, Algorithm algorithm, double beta) {
  if (td_error > 0.0) return 1.0;
  switch (algorithm) {
    case Algorithm::kHIqn:
    case Algorithm::kHDqn:
      return beta;
    case Algorithm::kLIqn:
      return tdl;
    case Algorithm::kLhIqn:
      return std::max(beta, tdl);
    default:
      return 1.0;
  }
}

}  // namespace lhiqn::agent
