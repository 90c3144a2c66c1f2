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

#include "marl/env.h"

#include <algorithm>

#include "common/error.h"

namespace mabr::marl {

EnvContext EnvContext::FromConfig(const Config& config) {
  EnvContext ctx;
  ctx.codec = codec::RateQualityParams::FromConfig(config);
  ctx.session = sim::SessionParams::FromConfig(config);
  ctx.norms = agents::AgentNorms::FromConfig(config);
  ctx.reward = RewardWeights::FromConfig(config);
  return ctx;
}

MambaEnv::MambaEnv(const trace::NetworkTrace& network,
                   const trace::ContentTrace& content, const EnvContext& context,
                   const EnvOptions& options, uint64_t seed)
    : context_(context),
      options_(options),
      history_(context.norms),
      config_(options.initial) {
  session_ = std::make_unique<sim::VideoSession>(network, content,
                                                 context.codec,
                                                 context.session, seed);
  if (options_.pinned_rf) config_.rate_factor = *options_.pinned_rf;
  if (options_.pinned_resolution) config_.resolution = *options_.pinned_resolution;
  if (options_.pinned_fps) config_.frame_rate = *options_.pinned_fps;
  const double trace_end = network.EndTime();
  episode_end_s_ = options.max_seconds > 0.0
                       ? std::min(options.max_seconds,
                                  trace_end > 0.0 ? trace_end : options.max_seconds)
                       : trace_end;
  if (episode_end_s_ <= 0.0) {
    throw ContractError("MambaEnv: empty episode (no trace end, no cap)");
  }
}

agents::AgentObservation MambaEnv::Observe(agents::AgentKind kind,
                                           bool foundation_mask) const {
  agents::AgentObservation obs = history_.Assemble(kind);
  if (foundation_mask) obs = agents::MaskForFoundation(kind, obs);
  return obs;
}

bool MambaEnv::done() const {
  return now_s() + context_.session.interval_s > episode_end_s_ + 1e-9;
}

MambaEnv::StepResult MambaEnv::Step(std::optional<int> qua_action,
                                    std::optional<int> res_action,
                                    std::optional<int> fr_action) {
  if (done()) throw ContractError("MambaEnv::Step after episode end");
  if (res_action && !AtResBoundary()) {
    throw ContractError("MambaEnv: res action off its 1 s boundary");
  }

  if (qua_action) {
    config_ = agents::ApplyAction(agents::AgentKind::kQua, *qua_action, config_);
  }
  if (res_action) {
    config_ = agents::ApplyAction(agents::AgentKind::kRes, *res_action, config_);
  }
  if (fr_action) {
    config_ = agents::ApplyAction(agents::AgentKind::kFr, *fr_action, config_);
  }
  if (options_.pinned_rf) config_.rate_factor = *options_.pinned_rf;
  if (options_.pinned_resolution) config_.resolution = *options_.pinned_resolution;
  if (options_.pinned_fps) config_.frame_rate = *options_.pinned_fps;

  StepResult result;
  result.interval = session_->StepInterval(config_);

  agents::IntervalRecord record;
  record.si = result.interval.si;
  record.ti = result.interval.ti;
  record.rate_factor = config_.rate_factor;
  record.resolution_fraction = codec::PixelFraction(config_.resolution);
  record.encode_fps = config_.frame_rate;
  record.playback_fps = result.interval.playback_fps;
  record.rtt_s = result.interval.feedback.interval_rtt_mean_s;
  record.loss_rate = result.interval.feedback.interval_loss_rate;
  record.t_end_s = result.interval.interval_end_s;
  history_.Append(record);

  result.reward = ComputeReward(QualityFromRateFactor(config_.rate_factor),
                                result.interval.playback_fps,
                                result.interval.feedback.frame_delay_s,
                                context_.reward);
  ++step_index_;
  result.done = done();
  return result;
}

}  // namespace mabr::marl
