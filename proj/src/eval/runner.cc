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

#include "eval/runner.h"

#include <algorithm>
#include <cmath>

#include "common/error.h"
#include "sim/session.h"

namespace mabr::eval {
namespace {

using agents::AgentKind;

QoERecord RecordFromInterval(const sim::IntervalResult& interval, int index) {
  QoERecord r;
  r.interval_index = index;
  r.video_kbps = interval.encoded_kbps;
  r.quality = interval.quality_mean;
  r.playback_fps = interval.playback_fps;
  r.frame_delay_s = interval.feedback.frame_delay_s;
  r.rtt_s = interval.feedback.interval_rtt_mean_s;
  r.loss_rate = interval.feedback.interval_loss_rate;
  return r;
}

// The baseline loop: GCC decides a target each feedback interval, the
// encoder runs in VBR mode (rate factor inverted from the target), and
// depending on the mode either the resolution table or the leaky-bucket
// frame gate assists.
EpisodeReport RunBaseline(Controller controller,
                          const trace::NetworkTrace& network,
                          const trace::ContentTrace& content,
                          const marl::EnvContext& context,
                          const gcc::GccParams& gcc_params,
                          const codec::EncoderConfig& initial,
                          const RunOptions& options, uint64_t seed) {
  const bool resolution_mode = controller == Controller::kGccOn;
  gcc::BaselineController baseline(
      gcc_params,
      resolution_mode ? gcc::BaselineController::Mode::kResolutionAdaptation
                      : gcc::BaselineController::Mode::kFrameSkipping,
      context.session.interval_s, initial.resolution);

  sim::VideoSession session(network, content, context.codec, context.session,
                            seed);
  const double end_s =
      options.episode_s > 0.0
          ? std::min(options.episode_s,
                     network.EndTime() > 0.0 ? network.EndTime()
                                             : options.episode_s)
          : network.EndTime();

  EpisodeReport report;
  report.controller = ControllerName(controller);
  report.trace_id = network.id;
  report.content_id = content.id;
  report.seed = seed;

  gcc::BaselineController::Decision decision = baseline.Initial();
  codec::Resolution last_resolution = decision.resolution;
  double gap_sum = 0.0;
  double target_sum = 0.0;
  int index = 0;
  while (session.now_s() + context.session.interval_s <= end_s + 1e-9) {
    double si = 0.0, ti = 0.0;
    session.PeekContent(&si, &ti);

    codec::EncoderConfig config;
    config.resolution = decision.resolution;
    config.frame_rate = decision.frame_rate;
    const double rf_real = codec::InvertRateFactor(
        decision.target_kbps, config.resolution, config.frame_rate, si, ti,
        context.codec);
    config.rate_factor =
        std::clamp(static_cast<int>(std::lround(rf_real)),
                   codec::kMinRateFactor, codec::kMaxRateFactor);

    gcc::BucketFrameGate gate(&baseline.bucket(), decision.target_kbps);
    sim::IntervalResult interval = session.StepInterval(
        config, resolution_mode ? nullptr : &gate);

    report.records.push_back(RecordFromInterval(interval, index));
    report.frames_skipped += interval.frames_skipped;
    if (config.resolution != last_resolution) ++report.resolution_changes;
    last_resolution = config.resolution;
    gap_sum += std::fabs(interval.encoded_kbps - decision.target_kbps);
    target_sum += decision.target_kbps;

    decision = baseline.OnFeedback(interval.feedback);
    ++index;
  }
  report.means = ComputeMeans(report.records);
  const auto n = static_cast<double>(std::max<size_t>(1, report.records.size()));
  report.mean_target_kbps = target_sum / n;
  report.mean_abs_target_gap_kbps = gap_sum / n;
  return report;
}

EpisodeReport RunLearned(Controller controller,
                         const trace::NetworkTrace& network,
                         const trace::ContentTrace& content,
                         const marl::EnvContext& context,
                         const codec::EncoderConfig& initial,
                         const ControllerAssets& assets,
                         const RunOptions& options, uint64_t seed) {
  if (!assets.actors.has_value()) {
    throw ConfigError(std::string("controller ") + ControllerName(controller) +
                      " needs actor checkpoints");
  }
  const auto& actors = *assets.actors;

  marl::EnvOptions env_options;
  env_options.initial = initial;
  env_options.max_seconds = options.episode_s;
  if (controller == Controller::kMambaBeta) {
    env_options.pinned_fps = codec::kMaxFrameRate;  // fr agent disabled
  }
  marl::MambaEnv env(network, content, context, env_options, seed);

  EpisodeReport report;
  report.controller = ControllerName(controller);
  report.trace_id = network.id;
  report.content_id = content.id;
  report.seed = seed;

  codec::Resolution last_resolution = env.config().resolution;
  int index = 0;
  while (!env.done()) {
    const int a_q = nn::Argmax(
        nn::Forward(actors[0], env.Observe(AgentKind::kQua).Sequence()).probs);
    std::optional<int> a_r;
    if (env.AtResBoundary()) {
      a_r = nn::Argmax(
          nn::Forward(actors[1], env.Observe(AgentKind::kRes).Sequence()).probs);
    }
    std::optional<int> a_f;
    if (controller == Controller::kMamba) {
      a_f = nn::Argmax(
          nn::Forward(actors[2], env.Observe(AgentKind::kFr).Sequence()).probs);
    }
    marl::MambaEnv::StepResult sr = env.Step(a_q, a_r, a_f);
    report.records.push_back(RecordFromInterval(sr.interval, index));
    if (env.config().resolution != last_resolution) ++report.resolution_changes;
    last_resolution = env.config().resolution;
    ++index;
  }
  report.means = ComputeMeans(report.records);
  return report;
}

}  // namespace

const char* ControllerName(Controller controller) {
  switch (controller) {
    case Controller::kGccOn: return "gcc_on";
    case Controller::kGccOff: return "gcc_off";
    case Controller::kMamba: return "mamba";
    case Controller::kMambaBeta: return "mamba_beta";
  }
  return "?";
}

Controller ParseController(const std::string& name) {
  if (name == "gcc_on") return Controller::kGccOn;
  if (name == "gcc_off") return Controller::kGccOff;
  if (name == "mamba") return Controller::kMamba;
  if (name == "mamba_beta") return Controller::kMambaBeta;
  throw ConfigError("unknown controller: " + name);
}

EpisodeReport RunEpisode(Controller controller,
                         const trace::NetworkTrace& network,
                         const trace::ContentTrace& content,
                         const marl::EnvContext& context,
                         const gcc::GccParams& gcc_params,
                         const codec::EncoderConfig& initial,
                         const ControllerAssets& assets,
                         const RunOptions& options, uint64_t seed) {
  switch (controller) {
    case Controller::kGccOn:
    case Controller::kGccOff:
      return RunBaseline(controller, network, content, context, gcc_params,
                         initial, options, seed);
    case Controller::kMamba:
    case Controller::kMambaBeta:
      return RunLearned(controller, network, content, context, initial, assets,
                        options, seed);
  }
  throw ContractError("RunEpisode: bad controller");
}

std::vector<double> EvaluatePolicyReward(
    const std::array<nn::PolicyParameters, 3>* actors,
    marl::EpisodeProvider& provider, const PolicyEvalOptions& options,
    uint64_t seed) {
  if (actors == nullptr && !options.random_policy) {
    throw ContractError("EvaluatePolicyReward: no actors and not random");
  }
  Rng rng(DeriveSeed(seed, "policy-eval"));
  std::vector<double> episode_rewards;

  for (int e = 0; e < options.episodes; ++e) {
    std::unique_ptr<marl::MambaEnv> env;
    if (options.foundation_agent.has_value()) {
      marl::EnvOptions env_options;
      env_options.max_seconds = options.train.episode_s;
      env_options.initial.rate_factor = options.train.pinned_rf;
      env_options.initial.resolution = options.train.pinned_resolution;
      env_options.initial.frame_rate = options.train.pinned_fps;
      switch (*options.foundation_agent) {
        case AgentKind::kQua:
          env_options.pinned_resolution = options.train.pinned_resolution;
          env_options.pinned_fps = options.train.pinned_fps;
          break;
        case AgentKind::kRes:
          env_options.pinned_rf = options.train.pinned_rf;
          env_options.pinned_fps = options.train.pinned_fps;
          break;
        case AgentKind::kFr:
          env_options.pinned_rf = options.train.pinned_rf;
          env_options.pinned_resolution = options.train.pinned_resolution;
          break;
      }
      env = provider.Next(env_options);

      const AgentKind kind = *options.foundation_agent;
      const int actor_index = kind == AgentKind::kQua ? 0
                              : kind == AgentKind::kRes ? 1 : 2;
      double sum = 0.0;
      int steps = 0;
      bool done = false;
      while (!done) {
        int action = 0;
        if (options.random_policy) {
          action = static_cast<int>(
              rng.UniformInt(agents::ActionSpace::Size(kind)));
        } else {
          const agents::AgentObservation obs = env->Observe(kind, true);
          action = nn::Argmax(
              nn::Forward((*actors)[actor_index], obs.Sequence()).probs);
        }
        if (kind == AgentKind::kRes) {
          for (int s = 0; s < agents::kResSubintervals && !done; ++s) {
            marl::MambaEnv::StepResult sr = env->Step(
                std::nullopt, s == 0 ? std::optional<int>(action) : std::nullopt,
                std::nullopt);
            sum += sr.reward;
            ++steps;
            done = sr.done;
          }
        } else {
          marl::MambaEnv::StepResult sr =
              kind == AgentKind::kQua
                  ? env->Step(action, std::nullopt, std::nullopt)
                  : env->Step(std::nullopt, std::nullopt, action);
          sum += sr.reward;
          ++steps;
          done = sr.done;
        }
      }
      episode_rewards.push_back(sum / std::max(1, steps));
      continue;
    }

    // Joint run: all three agents act on their cadences.
    marl::EnvOptions env_options;
    env_options.initial = options.train.initial;
    env_options.max_seconds = options.train.episode_s;
    env = provider.Next(env_options);
    double sum = 0.0;
    int steps = 0;
    bool done = false;
    while (!done) {
      int a_q = 0, a_f = 0;
      std::optional<int> a_r;
      if (options.random_policy) {
        a_q = static_cast<int>(
            rng.UniformInt(agents::ActionSpace::Size(AgentKind::kQua)));
        a_f = static_cast<int>(
            rng.UniformInt(agents::ActionSpace::Size(AgentKind::kFr)));
        if (env->AtResBoundary()) {
          a_r = static_cast<int>(
              rng.UniformInt(agents::ActionSpace::Size(AgentKind::kRes)));
        }
      } else {
        const bool masks = options.joint_foundation_masks;
        a_q = nn::Argmax(
            nn::Forward((*actors)[0],
                        env->Observe(AgentKind::kQua, masks).Sequence())
                .probs);
        a_f = nn::Argmax(
            nn::Forward((*actors)[2],
                        env->Observe(AgentKind::kFr, masks).Sequence())
                .probs);
        if (env->AtResBoundary()) {
          a_r = nn::Argmax(
              nn::Forward((*actors)[1],
                          env->Observe(AgentKind::kRes, masks).Sequence())
                  .probs);
        }
      }
      marl::MambaEnv::StepResult sr = env->Step(a_q, a_r, a_f);
      sum += sr.reward;
      ++steps;
      done = sr.done;
    }
    episode_rewards.push_back(sum / std::max(1, steps));
  }
  return episode_rewards;
}

}  // namespace mabr::eval
