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

#include "lhiqn/harness/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "lhiqn/errors.h"
#include "lhiqn/harness/checkpoint.h"
#include "lhiqn/harness/metrics.h"
#include "lhiqn/replay/cert_buffer.h"

namespace lhiqn::harness {

namespace {

std::mutex log_mutex;

void Log(std::ostream* log, const std::string& line) {
  if (log == nullptr) return;
  std::lock_guard<std::mutex> lock(log_mutex);
  *log << line << std::endl;
}

template <typename Choose>
EvalResult Rollouts(const env::EnvConfig& config, std::uint64_t seed, int episodes,
                    Choose&& choose) {
  if (episodes < 1) throw std::invalid_argument("evaluate: episodes must be >= 1");
  env::EnvConfig eval_config = config;
  eval_config.seed = seed;
  auto environment = env::MakeEnvironment(eval_config);
  Rng rng(MixSeed(seed));
  double total_return = 0.0, total_length = 0.0;
  for (int e = 0; e < episodes; ++e) {
    auto obs = environment->Reset();
    double ret = 0.0;
    int length = 0;
    for (bool done = false; !done;) {
      const JointAction actions = choose(*environment, obs, e, rng);
      const env::JointStep step = environment->Step(actions);
      ret += step.reward;
      ++length;
      done = step.terminal;
      obs = step.observations;
    }
    total_return += ret;
    total_length += length;
  }
  return {total_return / episodes, total_length / episodes};
}

}  // namespace

EvalResult EvaluatePolicy(const env::EnvConfig& config, std::uint64_t seed, int episodes,
                          const ScriptedPolicy& policy) {
  return Rollouts(config, seed, episodes,
                  [&](const env::Environment& e, const auto&, int, Rng& rng) {
                    return policy(e, rng);
                  });
}

EvalResult EvaluateLearners(std::span<agent::Learner* const> learners,
                            const env::EnvConfig& config, std::uint64_t seed, int episodes) {
  if (learners.size() != env::kNumAgents) {
    throw std::invalid_argument("evaluate: need one learner per agent");
  }
  const dist::DistortionOperator identity{};
  int current = -1;
  return Rollouts(config, seed, episodes,
                  [&](const env::Environment&, const std::vector<std::vector<float>>& obs,
                      int episode, Rng& rng) {
                    if (episode != current) {
                      for (agent::Learner* l : learners) l->BeginEpisode(agent::kEvalSlot);
                      current = episode;
                    }
                    JointAction actions{};
                    for (int a = 0; a < env::kNumAgents; ++a) {
                      actions[a] = learners[a]->Act(agent::kEvalSlot, obs[a], 0.0, identity, rng);
                    }
                    return actions;
                  });
}

std::string SeedCsvPath(const RunConfig& run, std::uint64_t seed) {
  return (std::filesystem::path(run.output_dir) / ("seed_" + std::to_string(seed) + ".csv"))
      .string();
}

SeedResult RunSeed(const ExperimentConfig& config, std::uint64_t seed, std::ostream* log) {
  const RunConfig& run = config.run;
  const agent::HyperParams& hp = config.agent;
  SeedResult result;
  result.seed = seed;
  result.csv_path = SeedCsvPath(run, seed);

  env::EnvConfig env_config = config.env;
  env_config.seed = DeriveSeed(seed, SeedStream::kEnv);
  auto environment = env::MakeEnvironment(env_config);
  const auto shape = environment->ObservationShape();
  const int num_actions = environment->num_actions();

  std::vector<std::unique_ptr<agent::Learner>> owned;
  std::vector<agent::Learner*> learners;
  std::vector<Rng> act_rngs;
  for (int a = 0; a < env::kNumAgents; ++a) {
    const auto init = a == 0 ? SeedStream::kInit0 : SeedStream::kInit1;
    const auto stream = a == 0 ? SeedStream::kAgent0 : SeedStream::kAgent1;
    owned.push_back(agent::MakeLearner(hp, shape, num_actions, DeriveSeed(seed, init),
                                       DeriveSeed(seed, stream)));
    learners.push_back(owned.back().get());
    act_rngs.emplace_back(DeriveSeed(seed, stream, 1));
  }
  replay::CertOptions replay_options;
  replay_options.num_agents = env::kNumAgents;
  replay_options.capacity_episodes = run.replay_capacity;
  replay_options.max_episode_length = config.env.episode_cap;
  replay_options.num_actions = num_actions;
  replay_options.seed = DeriveSeed(seed, SeedStream::kReplay);
  replay::CertBuffer buffer(replay_options);

  MetricsWriter writer(result.csv_path);
  const auto start = std::chrono::steady_clock::now();
  const int trace_len = hp.effective_trace_length();

  auto obs = environment->Reset();
  buffer.BeginEpisode();
  for (agent::Learner* l : learners) l->BeginEpisode(agent::kTrainSlot);
  double episode_return = 0.0;
  double finished_sum = 0.0;
  int finished = 0;
  std::optional<double> last_train_return;
  agent::TdlStats period_stats;
  long step = 0;
  long eval_index = 0;

  try {
    for (step = 1; step <= run.total_steps; ++step) {
      const agent::ScheduleValues sched = hp.Schedule(step - 1);
      const double epsilon = step <= run.warmup_steps ? 1.0 : sched.epsilon;
      const dist::DistortionOperator op{hp.distortion, sched.eta, hp.literal_cvnar};
      JointAction actions{};
      for (int a = 0; a < env::kNumAgents; ++a) {
        actions[a] = learners[a]->Act(agent::kTrainSlot, obs[a], epsilon, op, act_rngs[a]);
      }
      env::JointStep js = environment->Step(actions);
      for (int a = 0; a < env::kNumAgents; ++a) {
        buffer.Record(a, {obs[a], actions[a], js.reward, js.observations[a], js.terminal});
      }
      episode_return += js.reward;
      if (js.terminal) {
        finished_sum += episode_return;
        ++finished;
        episode_return = 0.0;
        obs = environment->Reset();
        buffer.BeginEpisode();
        for (agent::Learner* l : learners) l->BeginEpisode(agent::kTrainSlot);
      } else {
        obs = std::move(js.observations);
      }

      if (step > run.warmup_steps && step % run.train_period == 0 && buffer.ready()) {
        const auto indices = buffer.SampleIndices(hp.batch_size);
        if (run.threaded_learners) {
          const auto traces1 = buffer.Traces(1, *indices, trace_len);
          std::exception_ptr error;
          std::thread worker([&] {
            try {
              learners[1]->Train(traces1);
            } catch (...) {
              error = std::current_exception();
            }
          });
          try {
            learners[0]->Train(buffer.Traces(0, *indices, trace_len));
          } catch (...) {
            worker.join();
            throw;
          }
          worker.join();
          if (error) std::rethrow_exception(error);
        } else {
          for (int a = 0; a < env::kNumAgents; ++a) {
            learners[a]->Train(buffer.Traces(a, *indices, trace_len));
          }
        }
      }

      if (step % run.eval_period == 0 || step == run.total_steps) {
        const bool final_row = step == run.total_steps;
        const EvalResult eval = EvaluateLearners(
            learners, config.env, DeriveSeed(seed, SeedStream::kEval, eval_index++),
            final_row ? run.final_eval_episodes : run.eval_episodes);
        for (agent::Learner* l : learners) {
          const agent::TdlStats s = l->TakeStats();
          period_stats.tdl_sum += s.tdl_sum;
          period_stats.transitions += s.transitions;
          period_stats.negative_cells += s.negative_cells;
          period_stats.usage_cells += s.usage_cells;
        }
        MetricsRow row;
        row.step = step;
        if (finished > 0) last_train_return = finished_sum / finished;
        row.train_return = last_train_return;
        row.eval_return = eval.mean_return;
        row.eval_length = eval.mean_length;
        if (hp.variant.uses_tdl()) {
          row.tdl_mean = period_stats.mean_tdl();
          row.tdl_usage = period_stats.usage();
        }
        row.epsilon = epsilon;
        row.eta = sched.eta;
        if (run.wall_clock) {
          row.wall_seconds =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        writer.Write(row);
        finished_sum = 0.0;
        finished = 0;
        period_stats = agent::TdlStats{};
        if (final_row) result.final_eval_return = eval.mean_return;
        Log(log, "seed " + std::to_string(seed) + " step " + std::to_string(step) +
                     " eval_return " + std::to_string(eval.mean_return) + " epsilon " +
                     std::to_string(epsilon));
      }
    }
  } catch (const NumericError& e) {
    result.error = std::string(e.what()) + " (env step " + std::to_string(step) + ")";
    writer.WriteError(step, seed, result.error);
    Log(log, "seed " + std::to_string(seed) + " aborted: " + result.error);
    return result;
  }

  if (run.checkpoint) {
    result.checkpoint_path =
        (std::filesystem::path(run.output_dir) / ("seed_" + std::to_string(seed) + ".ckpt"))
            .string();
    SaveCheckpoint(result.checkpoint_path, config, seed, learners);
  }
  result.ok = true;
  return result;
}

std::vector<SeedResult> Run(const ExperimentConfig& config, std::ostream* log) {
  config.Validate();
  std::filesystem::create_directories(config.run.output_dir);
  const auto& seeds = config.run.seeds;
  std::vector<SeedResult> results(seeds.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(seeds.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        results[i] = RunSeed(config, seeds[i], log);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(config.run.workers, static_cast<int>(seeds.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace lhiqn::harness
