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

#ifndef MABR_MARL_ENV_H_
#define MABR_MARL_ENV_H_

#include <memory>
#include <optional>

#include "agents/agents.h"
#include "codec/codec.h"
#include "marl/reward.h"
#include "sim/session.h"
#include "trace/traces.h"

namespace mabr::marl {

// Everything an environment needs besides its traces.
struct EnvContext {
  codec::RateQualityParams codec;
  sim::SessionParams session;
  agents::AgentNorms norms;
  RewardWeights reward;

  static EnvContext FromConfig(const Config& config);
};

struct EnvOptions {
  codec::EncoderConfig initial;
  // Pins override the matching factor every step (curriculum stationarity
  // and the fr-pinned controller variant).
  std::optional<int> pinned_rf;
  std::optional<codec::Resolution> pinned_resolution;
  std::optional<int> pinned_fps;
  double max_seconds = 0.0;  // 0 = run to the network trace's end
};

// The decision process around one video session: applies agent actions to
// the encoder configuration at the base 0.1 s cadence, steps the simulator,
// maintains the observation history and computes the shared QoE reward.
class MambaEnv {
 public:
  MambaEnv(const trace::NetworkTrace& network, const trace::ContentTrace& content,
           const EnvContext& context, const EnvOptions& options, uint64_t seed);

  // Observation for the upcoming decision; covers only completed intervals.
  agents::AgentObservation Observe(agents::AgentKind kind,
                                   bool foundation_mask = false) const;

  // True when the next Step starts a res-agent interval (every 10th step).
  bool AtResBoundary() const { return step_index_ % agents::kResSubintervals == 0; }

  struct StepResult {
    double reward = 0.0;
    bool done = false;
    sim::IntervalResult interval;
  };

  // Applies the given action indices (nullopt keeps the factor), enforces
  // pins, then advances one 0.1 s interval.
  StepResult Step(std::optional<int> qua_action, std::optional<int> res_action,
                  std::optional<int> fr_action);

  const codec::EncoderConfig& config() const { return config_; }
  int step_index() const { return step_index_; }
  bool done() const;
  double now_s() const { return session_->now_s(); }

 private:
  EnvContext context_;
  EnvOptions options_;
  std::unique_ptr<sim::VideoSession> session_;
  agents::HistoryBuffer history_;
  codec::EncoderConfig config_;
  double episode_end_s_;
  int step_index_ = 0;
};

}  // namespace mabr::marl

#endif  // MABR_MARL_ENV_H_
