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

#ifndef MABR_AGENTS_AGENTS_H_
#define MABR_AGENTS_AGENTS_H_

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "codec/codec.h"
#include "common/config.h"

namespace mabr::agents {

// The three controllers: rate factor, resolution, frame rate.
enum class AgentKind { kQua, kRes, kFr };

inline constexpr int kNumAgents = 3;
inline constexpr int kHistoryLen = 6;  // past intervals per observation

// Decision cadence in seconds: 0.1 for qua/fr, 1.0 for res. A res decision
// coincides with every 10th qua/fr decision.
double AgentIntervalS(AgentKind kind);
// Base (0.1 s) intervals per res decision.
inline constexpr int kResSubintervals = 10;

const char* AgentKindName(AgentKind kind);
AgentKind ParseAgentKind(const std::string& name);

// The eight per-interval state features, in observation layout order.
enum Feature {
  kFeatSi = 0,
  kFeatTi,
  kFeatRateFactor,
  kFeatResolution,  // pixel fraction of 1440p
  kFeatEncodeFps,
  kFeatPlaybackFps,
  kFeatRtt,
  kFeatLoss,
  kNumFeatures,
};

// Discrete action sets. qua moves the rate factor by a delta (asymmetric:
// coarse increases for fast bitrate cuts, fine decreases for cautious
// quality ramps); fr picks an absolute frame rate (0 pauses capture); res
// picks the output resolution.
struct ActionSpace {
  static const std::array<int, 7>& QuaDeltas();
  static const std::array<int, 7>& FrRates();
  static const std::array<codec::Resolution, 4>& ResOptions();
  static int Size(AgentKind kind);
};

// Observation normalization constants.
struct AgentNorms {
  double si_norm = 100.0;
  double ti_norm = 100.0;
  double rtt_norm_s = 1.0;

  static AgentNorms FromConfig(const Config& config);
};

// One agent's network input: 8 features over the last K=6 of its intervals,
// all scaled to [0, 1], oldest first. Masked features read zero and carry a
// flag so training freezes the matching input weights.
struct AgentObservation {
  std::array<std::array<double, kHistoryLen>, kNumFeatures> features{};
  std::array<bool, kNumFeatures> mask{};
  double timestamp_s = 0.0;  // end of the newest interval covered

  // K x 8 matrix, row k = features at step k (oldest first); the recurrent
  // network's input sequence.
  Eigen::MatrixXd Sequence() const;
};

// Raw (unnormalized) record of one 0.1 s interval.
struct IntervalRecord {
  double si = 0.0;
  double ti = 0.0;
  double rate_factor = 0.0;
  double resolution_fraction = 0.0;
  double encode_fps = 0.0;
  double playback_fps = 0.0;
  double rtt_s = 0.0;
  double loss_rate = 0.0;
  double t_end_s = 0.0;
};

// Rolling history at the base 0.1 s cadence. qua/fr observations take the
// last 6 records; res observations average consecutives in blocks of 10 so
// its window spans 6 s of wall time. Missing history pads with zeros.
class HistoryBuffer {
 public:
  explicit HistoryBuffer(const AgentNorms& norms) : norms_(norms) {}

  void Append(const IntervalRecord& record);
  AgentObservation Assemble(AgentKind kind) const;
  size_t size() const { return records_.size(); }
  const IntervalRecord& back() const { return records_.back(); }

 private:
  AgentNorms norms_;
  std::vector<IntervalRecord> records_;
};

// Applies an action to the current configuration. qua clamps the rate factor
// into [0, 51]; res flags an encoder restart implicitly via the resolution
// change; fr 0 pauses capture (the clock keeps running and a later nonzero
// action resumes). Throws on an out-of-space index.
codec::EncoderConfig ApplyAction(AgentKind kind, int action_index,
                                 const codec::EncoderConfig& current);

// Foundation-course masking: each agent is blinded to the two factors owned
// by the other agents. qua loses resolution+frame rate, fr loses
// resolution+rate factor, res loses frame rate+rate factor. Idempotent.
AgentObservation MaskForFoundation(AgentKind kind, AgentObservation obs);
// The feature indices masked for `kind`; also the input columns to freeze.
std::vector<int> FoundationMaskedFeatures(AgentKind kind);

// Centralized-critic input: the three observations concatenated in fixed
// (qua, res, fr) order, feature-major within each block, followed by one-hot
// encodings of the latest actions (qua 7, res 4, fr 7). Length 162.
struct GlobalState {
  static constexpr int kObsBlock = kNumFeatures * kHistoryLen;  // 48
  static constexpr int kLength = kNumAgents * kObsBlock + 7 + 4 + 7;

  Eigen::VectorXd data;
  double timestamp_s = 0.0;

  // View for the critic's recurrent trunk: 6 rows, row k =
  // [qua feats at k (8), res feats at k (8), fr feats at k (8), one-hots (18)]
  // with the action block repeated on every step. 42 columns.
  Eigen::MatrixXd ToSequence() const;
  static constexpr int kSequenceCols = kNumAgents * kNumFeatures + 7 + 4 + 7;
};

// Observations must be aligned to the same latest 0.1 s boundary (the res
// observation updates only at 1 s boundaries but is timestamped at assembly).
GlobalState BuildGlobalState(const AgentObservation& qua,
                             const AgentObservation& res,
                             const AgentObservation& fr, int last_qua_action,
                             int last_res_action, int last_fr_action);

}  // namespace mabr::agents

#endif  // MABR_AGENTS_AGENTS_H_
