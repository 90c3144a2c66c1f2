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

#ifndef MABR_GCC_GCC_H_
#define MABR_GCC_GCC_H_

#include <span>
#include <utility>
#include <vector>

#include "codec/codec.h"
#include "common/config.h"
#include "sim/feedback.h"

namespace mabr::gcc {

struct GccParams {
  double rate_min_kbps = 200.0;
  double rate_max_kbps = 17000.0;
  double initial_rate_kbps = 1000.0;
  double loss_high = 0.10;
  double loss_low = 0.02;
  double increase_factor = 1.05;
  double overuse_factor = 0.85;
  double gamma_init_s = 0.005;
  double gamma_min_s = 0.001;
  double gamma_max_s = 0.100;
  double gamma_adapt = 0.1;
  double slope_alpha = 0.5;
  int overuse_sustain = 2;
  double bucket_threshold_intervals = 1.0;
  int capture_fps = 60;
  std::vector<double> resolution_thresholds_kbps = {0, 1500, 3500, 6500};

  static GccParams FromConfig(const Config& config);
};

// Loss-based rate control: multiplicative decrease above the high-loss
// threshold, slow increase below the low one, hold in between.
class LossController {
 public:
  LossController(const GccParams& params)
      : params_(params), rate_kbps_(params.initial_rate_kbps) {}

  double Update(double loss_rate);
  double rate_kbps() const { return rate_kbps_; }

 private:
  GccParams params_;
  double rate_kbps_;
};

enum class NetworkUsage { kNormal, kOveruse, kUnderuse };

// Delay-based rate control. Filters the RTT slope with an EWMA; sustained
// positive trend beyond the adaptive threshold means the queue is filling
// (overuse) and the rate snaps below the received rate. A falling trend
// (underuse) holds while the queue drains; otherwise probe upward.
class DelayController {
 public:
  DelayController(const GccParams& params)
      : params_(params),
        rate_kbps_(params.initial_rate_kbps),
        gamma_s_(params.gamma_init_s) {}

  double Update(std::span<const double> rtt_samples_s, double received_kbps);

  double rate_kbps() const { return rate_kbps_; }
  NetworkUsage state() const { return state_; }
  double trend_s() const { return trend_s_; }
  double gamma_s() const { return gamma_s_; }

 private:
  GccParams params_;
  double rate_kbps_;
  double gamma_s_;
  double trend_s_ = 0.0;
  NetworkUsage state_ = NetworkUsage::kNormal;
  bool has_prev_mean_ = false;
  double prev_rtt_mean_s_ = 0.0;
  int over_count_ = 0;
};

// The target bitrate is the minimum of the two controllers' outcomes.
double Combine(double loss_rate_kbps, double delay_rate_kbps);

// Fixed bitrate -> resolution mapping: highest entry whose threshold is at or
// below the target; below the lowest threshold, the lowest resolution.
class ResolutionTable {
 public:
  // thresholds_kbps[i] belongs to the i-th resolution, low to high; must be
  // strictly increasing.
  explicit ResolutionTable(const std::vector<double>& thresholds_kbps);

  codec::Resolution Map(double target_kbps) const;

 private:
  std::vector<std::pair<double, codec::Resolution>> entries_;
};

// Byte-budget accumulator for frame skipping: the level rises with emitted
// frames and drains at the target rate; when it exceeds the threshold the
// next frame(s) are skipped.
class LeakyBucket {
 public:
  LeakyBucket(double threshold_intervals, double interval_s)
      : threshold_intervals_(threshold_intervals), interval_s_(interval_s) {}

  // Returns skip_next.
  bool Step(double frame_bytes, double tick_s, double target_kbps);

  double level_bytes() const { return level_bytes_; }
  double ThresholdBytes(double target_kbps) const {
    return target_kbps * 1000.0 / 8.0 * interval_s_ * threshold_intervals_;
  }

 private:
  double threshold_intervals_;
  double interval_s_;
  double level_bytes_ = 0.0;
};

// Adapts LeakyBucket to the encoder's per-frame gate.
class BucketFrameGate : public codec::FrameGate {
 public:
  BucketFrameGate(LeakyBucket* bucket, double target_kbps)
      : bucket_(bucket), target_kbps_(target_kbps) {}

  bool ShouldEncode(double frame_time_s, double frame_interval_s) override;
  void OnEncoded(int frame_bytes) override;

  int skipped() const { return skipped_; }

 private:
  LeakyBucket* bucket_;
  double target_kbps_;
  int skipped_ = 0;
};

// The full baseline: GCC target decision plus either table-driven resolution
// adaptation (default) or leaky-bucket frame skipping. The two bitrate-control
// aids are mutually exclusive.
class BaselineController {
 public:
  enum class Mode { kResolutionAdaptation, kFrameSkipping };

  struct Decision {
    double target_kbps = 0.0;
    codec::Resolution resolution = codec::Resolution::k1080p;
    int frame_rate = 60;
  };

  BaselineController(const GccParams& params, Mode mode, double interval_s,
                     codec::Resolution fixed_resolution = codec::Resolution::k1080p);

  // First decision, before any feedback exists.
  Decision Initial() const;
  Decision OnFeedback(const sim::LinkFeedback& feedback);

  Mode mode() const { return mode_; }
  LeakyBucket& bucket() { return bucket_; }
  const DelayController& delay_controller() const { return delay_; }

 private:
  GccParams params_;
  Mode mode_;
  double interval_s_;
  codec::Resolution fixed_resolution_;
  LossController loss_;
  DelayController delay_;
  ResolutionTable table_;
  LeakyBucket bucket_;
  double target_kbps_;
};

}  // namespace mabr::gcc

#endif  // MABR_GCC_GCC_H_
