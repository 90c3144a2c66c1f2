/*
 * Copyright 2026 The mabr-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MABR_MARL_TRAINER_H_
#define MABR_MARL_TRAINER_H_

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "common/rng.h"
#include "marl/env.h"
#include "marl/ppo.h"
#include "nn/network.h"

namespace mabr::marl {

// Deterministic episode stream over a trace pool: episode k pairs the k-th
// network trace (round robin) with a seeded content pick and a derived
// session seed.
class EpisodeProvider {
 public:
  EpisodeProvider(std::vector<trace::NetworkTrace> networks,
                  std::vector<trace::ContentTrace> contents,
                  const EnvContext& context, uint64_t seed);

  std::unique_ptr<MambaEnv> Next(const EnvOptions& options);
  void Reset() { episode_counter_ = 0; }

  const EnvContext& context() const { return context_; }

 private:
  std::vector<trace::NetworkTrace> networks_;
  std::vector<trace::ContentTrace> contents_;
  EnvContext context_;
  uint64_t seed_;
  uint64_t episode_counter_ = 0;
};

struct TrainOptions {
  int epochs = 60;
  uint64_t seed = 1;
  int pinned_rf = 23;
  codec::Resolution pinned_resolution = codec::Resolution::k1080p;
  int pinned_fps = 30;
  codec::EncoderConfig initial;       // team-course / execution start config
  double episode_s = 32.0;
  int res_rollout_divisor = 4;
  // When set, a divergence abort saves the in-progress parameters here
  // before rethrowing.
  std::string abort_checkpoint_dir;

  static TrainOptions FromConfig(const Config& config, uint64_t seed);
};

struct TrainLogRow {
  int epoch = 0;
  std::string stage;
  std::string agent;
  double mean_reward = 0.0;
  double surrogate = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double beta = 0.0;
};

void WriteTrainLog(const std::vector<TrainLogRow>& rows,
                   const std::string& path);

struct FoundationResult {
  nn::PolicyParameters actor;
  nn::PolicyParameters critic;
  std::vector<TrainLogRow> log;
};

// Stage 1: single-agent PPO in a stationarized environment. The other two
// factors are pinned, the observation features they would produce are masked
// and the matching input weights frozen.
FoundationResult TrainFoundation(agents::AgentKind kind,
                                 EpisodeProvider& provider,
                                 const PpoConfig& ppo,
                                 const TrainOptions& options);

struct TeamResult {
  std::array<nn::PolicyParameters, agents::kNumAgents> actors;  // qua, res, fr
  nn::PolicyParameters critic;  // shared, centralized
  std::vector<TrainLogRow> log;
};

// Stage 2: MAPPO. Actors start from the stage-1 weights with masks lifted
// and input columns unfrozen; one shared critic reads the global state. All
// agents receive the shared reward; the res agent's per-decision reward is
// the mean of the ten 0.1 s rewards in its interval.
TeamResult TrainTeam(const std::array<nn::PolicyParameters, 3>& stage1_actors,
                     EpisodeProvider& provider, const PpoConfig& ppo,
                     const TrainOptions& options);

// Actor network spec for an agent (softmax head over its action set).
nn::NetworkSpec ActorSpec(agents::AgentKind kind);
// Local critic (foundation) and centralized critic (team) specs.
nn::NetworkSpec LocalCriticSpec();
nn::NetworkSpec CentralCriticSpec();

// Deterministic categorical draw from a probability vector.
int SampleCategorical(Rng& rng, const Eigen::VectorXd& probs);

// Index of a configuration value within its agent's action set (for one-hot
// encoding of held actions).
int ActionIndexOf(agents::AgentKind kind, const codec::EncoderConfig& config);

}  // namespace mabr::marl

#endif  // MABR_MARL_TRAINER_H_
