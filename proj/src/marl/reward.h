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

#ifndef MABR_MARL_REWARD_H_
#define MABR_MARL_REWARD_H_

#include "codec/codec.h"
#include "common/config.h"

namespace mabr::marl {

struct RewardWeights {
  double lambda = 1.0;  // picture quality
  double nu = 8.0;      // playback fluency
  double mu = 6.0;      // frame delay

  static RewardWeights FromConfig(const Config& config) {
    RewardWeights w;
    w.lambda = config.GetDouble("reward.lambda");
    w.nu = config.GetDouble("reward.nu");
    w.mu = config.GetDouble("reward.mu");
    return w;
  }
};

// Shared QoE reward: r = lambda*q + nu*(h/60) - mu*d, with the quality term
// taken from the rate factor, q = (51 - rf)/51, playback normalized by
// 60 fps, and d the frame delay in seconds.
inline double ComputeReward(double q_norm, double playback_fps,
                            double frame_delay_s, const RewardWeights& w) {
  return w.lambda * q_norm + w.nu * (playback_fps / 60.0) -
         w.mu * frame_delay_s;
}

inline double QualityFromRateFactor(int rate_factor) {
  return static_cast<double>(codec::kMaxRateFactor - rate_factor) /
         static_cast<double>(codec::kMaxRateFactor);
}

}  // namespace mabr::marl

#endif  // MABR_MARL_REWARD_H_
