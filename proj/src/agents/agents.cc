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

#include "agents/agents.h"

#include <algorithm>
#include <cmath>

#include "common/error.h"

namespace mabr::agents {
namespace {

double Clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double AgentIntervalS(AgentKind kind) {
  return kind == AgentKind::kRes ? 1.0 : 0.1;
}

const char* AgentKindName(AgentKind kind) {
  switch (kind) {
    case AgentKind::kQua: return "qua";
    case AgentKind::kRes: return "res";
    case AgentKind::kFr: return "fr";
  }
  return "?";
}

AgentKind ParseAgentKind(const std::string& name) {
  if (name == "qua") return AgentKind::kQua;
  if (name == "res") return AgentKind::kRes;
  if (name == "fr") return AgentKind::kFr;
  throw ConfigError("unknown agent: " + name);
}

const std::array<int, 7>& ActionSpace::QuaDeltas() {
  static const std::array<int, 7> kDeltas = {+8, +4, +2, 0, -1, -2, -4};
  return kDeltas;
}

const std::array<int, 7>& ActionSpace::FrRates() {
  static const std::array<int, 7> kRates = {60, 50, 40, 30, 20, 10, 0};
  return kRates;
}

const std::array<codec::Resolution, 4>& ActionSpace::ResOptions() {
  static const std::array<codec::Resolution, 4> kOptions = {
      codec::Resolution::k1440p, codec::Resolution::k1080p,
      codec::Resolution::k720p, codec::Resolution::k540p};
  return kOptions;
}

int ActionSpace::Size(AgentKind kind) {
  switch (kind) {
    case AgentKind::kQua: return static_cast<int>(QuaDeltas().size());
    case AgentKind::kRes: return static_cast<int>(ResOptions().size());
    case AgentKind::kFr: return static_cast<int>(FrRates().size());
  }
  return 0;
}

AgentNorms AgentNorms::FromConfig(const Config& config) {
  AgentNorms norms;
  norms.si_norm = config.GetDouble("agents.si_norm");
  norms.ti_norm = config.GetDouble("agents.ti_norm");
  norms.rtt_norm_s = config.GetDouble("agents.rtt_norm_s");
  return norms;
}

Eigen::MatrixXd AgentObservation::Sequence() const {
  Eigen::MatrixXd seq(kHistoryLen, kNumFeatures);
  for (int k = 0; k < kHistoryLen; ++k) {
    for (int f = 0; f < kNumFeatures; ++f) {
      seq(k, f) = features[f][k];
    }
  }
  return seq;
}

void HistoryBuffer::Append(const IntervalRecord& record) {
  records_.push_back(record);
}

AgentObservation HistoryBuffer::Assemble(AgentKind kind) const {
  const int block = kind == AgentKind::kRes ? kResSubintervals : 1;
  AgentObservation obs;
  obs.timestamp_s = records_.empty() ? 0.0 : records_.back().t_end_s;

  for (int k = 0; k < kHistoryLen; ++k) {
    // Window k (k=0 oldest) covers `block` records ending at the buffer tail.
    const auto offset_from_end =
        static_cast<long>((kHistoryLen - k) * block);
    const long begin = static_cast<long>(records_.size()) - offset_from_end;
    IntervalRecord mean{};
    int have = 0;
    for (long i = std::max(0L, begin); i < begin + block; ++i) {
      if (i < 0 || i >= static_cast<long>(records_.size())) continue;
      const IntervalRecord& r = records_[static_cast<size_t>(i)];
      mean.si += r.si;
      mean.ti += r.ti;
      mean.rate_factor += r.rate_factor;
      mean.resolution_fraction += r.resolution_fraction;
      mean.encode_fps += r.encode_fps;
      mean.playback_fps += r.playback_fps;
      mean.rtt_s += r.rtt_s;
      mean.loss_rate += r.loss_rate;
      ++have;
    }
    if (have == 0) continue;  // zero padding before episode start
    const double inv = 1.0 / have;
    obs.features[kFeatSi][k] = Clamp01(mean.si * inv / norms_.si_norm);
    obs.features[kFeatTi][k] = Clamp01(mean.ti * inv / norms_.ti_norm);
    obs.features[kFeatRateFactor][k] =
        Clamp01(mean.rate_factor * inv / codec::kMaxRateFactor);
    obs.features[kFeatResolution][k] = Clamp01(mean.resolution_fraction * inv);
    obs.features[kFeatEncodeFps][k] =
        Clamp01(mean.encode_fps * inv / codec::kMaxFrameRate);
    obs.features[kFeatPlaybackFps][k] =
        Clamp01(mean.playback_fps * inv / codec::kMaxFrameRate);
    obs.features[kFeatRtt][k] = Clamp01(mean.rtt_s * inv / norms_.rtt_norm_s);
    obs.features[kFeatLoss][k] = Clamp01(mean.loss_rate * inv);
  }
  return obs;
}

codec::EncoderConfig ApplyAction(AgentKind kind, int action_index,
                                 const codec::EncoderConfig& current) {
  if (action_index < 0 || action_index >= ActionSpace::Size(kind)) {
    throw ContractError("ApplyAction: index outside the action space");
  }
  codec::EncoderConfig next = current;
  switch (kind) {
    case AgentKind::kQua:
      next.rate_factor =
          std::clamp(current.rate_factor + ActionSpace::QuaDeltas()[action_index],
                     codec::kMinRateFactor, codec::kMaxRateFactor);
      break;
    case AgentKind::kRes:
      next.resolution = ActionSpace::ResOptions()[action_index];
      break;
    case AgentKind::kFr:
      next.frame_rate = ActionSpace::FrRates()[action_index];
      break;
  }
  return next;
}

std::vector<int> FoundationMaskedFeatures(AgentKind kind) {
  switch (kind) {
    case AgentKind::kQua: return {kFeatResolution, kFeatEncodeFps};
    case AgentKind::kFr: return {kFeatResolution, kFeatRateFactor};
    case AgentKind::kRes: return {kFeatEncodeFps, kFeatRateFactor};
  }
  return {};
}

AgentObservation MaskForFoundation(AgentKind kind, AgentObservation obs) {
  for (int f : FoundationMaskedFeatures(kind)) {
    obs.mask[f] = true;
    obs.features[f].fill(0.0);
  }
  return obs;
}

GlobalState BuildGlobalState(const AgentObservation& qua,
                             const AgentObservation& res,
                             const AgentObservation& fr, int last_qua_action,
                             int last_res_action, int last_fr_action) {
  if (qua.timestamp_s != res.timestamp_s || qua.timestamp_s != fr.timestamp_s) {
    throw ContractError("BuildGlobalState: observations not time-aligned");
  }
  if (last_qua_action < 0 || last_qua_action >= ActionSpace::Size(AgentKind::kQua) ||
      last_res_action < 0 || last_res_action >= ActionSpace::Size(AgentKind::kRes) ||
      last_fr_action < 0 || last_fr_action >= ActionSpace::Size(AgentKind::kFr)) {
    throw ContractError("BuildGlobalState: action index outside its space");
  }

  GlobalState gs;
  gs.timestamp_s = qua.timestamp_s;
  gs.data = Eigen::VectorXd::Zero(GlobalState::kLength);
  const AgentObservation* blocks[kNumAgents] = {&qua, &res, &fr};
  int offset = 0;
  for (const AgentObservation* obs : blocks) {
    for (int f = 0; f < kNumFeatures; ++f) {
      for (int k = 0; k < kHistoryLen; ++k) {
        gs.data[offset + f * kHistoryLen + k] = obs->features[f][k];
      }
    }
    offset += GlobalState::kObsBlock;
  }
  gs.data[offset + last_qua_action] = 1.0;
  offset += ActionSpace::Size(AgentKind::kQua);
  gs.data[offset + last_res_action] = 1.0;
  offset += ActionSpace::Size(AgentKind::kRes);
  gs.data[offset + last_fr_action] = 1.0;
  return gs;
}

Eigen::MatrixXd GlobalState::ToSequence() const {
  Eigen::MatrixXd seq(kHistoryLen, kSequenceCols);
  const int actions = 7 + 4 + 7;
  for (int k = 0; k < kHistoryLen; ++k) {
    for (int a = 0; a < kNumAgents; ++a) {
      for (int f = 0; f < kNumFeatures; ++f) {
        seq(k, a * kNumFeatures + f) =
            data[a * kObsBlock + f * kHistoryLen + k];
      }
    }
    for (int j = 0; j < actions; ++j) {
      seq(k, kNumAgents * kNumFeatures + j) = data[kNumAgents * kObsBlock + j];
    }
  }
  return seq;
}

}  // namespace mabr::agents
