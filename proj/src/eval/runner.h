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

#ifndef MABR_EVAL_RUNNER_H_
#define MABR_EVAL_RUNNER_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "eval/qoe.h"
#include "gcc/gcc.h"
#include "marl/env.h"
#include "marl/trainer.h"
#include "nn/network.h"
#include "trace/traces.h"

namespace mabr::eval {

// gcc_on: GCC + table-driven resolution adaptation (the default baseline).
// gcc_off: GCC + fixed resolution + leaky-bucket frame skipping.
// mamba: all three trained agents. mamba_beta: qua+res only, frame rate
// pinned at 60.
enum class Controller { kGccOn, kGccOff, kMamba, kMambaBeta };

const char* ControllerName(Controller controller);
Controller ParseController(const std::string& name);

// Trained actors in (qua, res, fr) order; the MARL controllers need them,
// the baselines ignore them.
struct ControllerAssets {
  std::optional<std::array<nn::PolicyParameters, 3>> actors;
};

struct RunOptions {
  double episode_s = 0.0;  // 0 = full trace
};

// One full episode. Learned policies execute greedily (argmax over the
// actor's distribution, actors only, no critic); the codec/loss noise
// follows the seed, so identical inputs give identical reports.
EpisodeReport RunEpisode(Controller controller,
                         const trace::NetworkTrace& network,
                         const trace::ContentTrace& content,
                         const marl::EnvContext& context,
                         const gcc::GccParams& gcc_params,
                         const codec::EncoderConfig& initial,
                         const ControllerAssets& assets,
                         const RunOptions& options, uint64_t seed);

// Policy-reward evaluation used by the training-efficacy checks.
struct PolicyEvalOptions {
  int episodes = 20;
  // Single-agent stationary setting: the other two factors are pinned and
  // the agent sees its foundation-masked observations.
  std::optional<agents::AgentKind> foundation_agent;
  // Joint run with each actor observing through its foundation mask (the
  // stage-1 ablation); ignored in foundation mode.
  bool joint_foundation_masks = false;
  // Uniform-random actions instead of the actors' argmax.
  bool random_policy = false;
  marl::TrainOptions train;
};

// Returns each episode's mean per-step reward. `actors` may be null only for
// the random policy.
std::vector<double> EvaluatePolicyReward(
    const std::array<nn::PolicyParameters, 3>* actors,
    marl::EpisodeProvider& provider, const PolicyEvalOptions& options,
    uint64_t seed);

}  // namespace mabr::eval

#endif  // MABR_EVAL_RUNNER_H_
