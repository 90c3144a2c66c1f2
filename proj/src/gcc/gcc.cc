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

#include "gcc/gcc.h"

#include <algorithm>
#include <cmath>

#include "common/error.h"

namespace mabr::gcc {

GccParams GccParams::FromConfig(const Config& config) {
  GccParams p;
  p.rate_min_kbps = config.GetDouble("gcc.rate_min_kbps");
  p.rate_max_kbps = config.GetDouble("gcc.rate_max_kbps");
  p.initial_rate_kbps = config.GetDouble("gcc.initial_rate_kbps");
  p.loss_high = config.GetDouble("gcc.loss_high");
  p.loss_low = config.GetDouble("gcc.loss_low");
  p.increase_factor = config.GetDouble("gcc.increase_factor");
  p.overuse_factor = config.GetDouble("gcc.overuse_factor");
  p.gamma_init_s = config.GetDouble("gcc.gamma_init_ms") / 1000.0;
  p.gamma_min_s = config.GetDouble("gcc.gamma_min_ms") / 1000.0;
  p.gamma_max_s = config.GetDouble("gcc.gamma_max_ms") / 1000.0;
  p.gamma_adapt = config.GetDouble("gcc.gamma_adapt");
  p.slope_alpha = config.GetDouble("gcc.slope_alpha");
  p.overuse_sustain = config.GetInt("gcc.overuse_sustain");
  p.bucket_threshold_intervals = config.GetDouble("gcc.bucket_threshold_intervals");
  p.capture_fps = config.GetInt("gcc.capture_fps");
  p.resolution_thresholds_kbps = config.GetDoubleList("gcc.res_thresholds_kbps");
  return p;
}

double LossController::Update(double loss_rate) {
  if (loss_rate < 0.0 || loss_rate > 1.0) {
    throw ContractError("LossController: loss_rate outside [0,1]");
  }
  if (loss_rate > params_.loss_high) {
    rate_kbps_ *= 1.0 - 0.5 * loss_rate;
  } else if (loss_rate < params_.loss_low) {
    rate_kbps_ *= params_.increase_factor;
  }
  rate_kbps_ = std::clamp(rate_kbps_, params_.rate_min_kbps, params_.rate_max_kbps);
  return rate_kbps_;
}

double DelayController::Update(std::span<const double> rtt_samples_s,
                               double received_kbps) {
  if (rtt_samples_s.empty()) {
    throw ContractError("DelayController: need at least one RTT sample");
  }
  double mean = 0.0;
  for (double s : rtt_samples_s) mean += s;
  mean /= static_cast<double>(rtt_samples_s.size());

  if (has_prev_mean_) {
    const double slope = mean - prev_rtt_mean_s_;  // seconds per interval
    trend_s_ = (1.0 - params_.slope_alpha) * trend_s_ + params_.slope_alpha * slope;
  }
  prev_rtt_mean_s_ = mean;
  has_prev_mean_ = true;

  if (trend_s_ > gamma_s_) {
    ++over_count_;
    // Overuse needs a sustained trend; once entered it persists while the
    // trend stays above threshold.
    if (over_count_ >= params_.overuse_sustain || state_ == NetworkUsage::kOveruse) {
      state_ = NetworkUsage::kOveruse;
    } else {
      state_ = NetworkUsage::kNormal;
    }
  } else {
    over_count_ = 0;
    state_ = trend_s_ < -gamma_s_ ? NetworkUsage::kUnderuse : NetworkUsage::kNormal;
  }

  switch (state_) {
    case NetworkUsage::kOveruse:
      rate_kbps_ = params_.overuse_factor * received_kbps;
      break;
    case NetworkUsage::kNormal:
      rate_kbps_ *= params_.increase_factor;
      break;
    case NetworkUsage::kUnderuse:
      break;  // hold while the queue drains
  }
  rate_kbps_ = std::clamp(rate_kbps_, params_.rate_min_kbps, params_.rate_max_kbps);

  // Threshold tracks the trend magnitude so persistent jitter is absorbed.
  gamma_s_ = std::clamp(
      gamma_s_ + params_.gamma_adapt * (std::fabs(trend_s_) - gamma_s_),
      params_.gamma_min_s, params_.gamma_max_s);
  return rate_kbps_;
}

double Combine(double loss_rate_kbps, double delay_rate_kbps) {
  if (loss_rate_kbps <= 0.0 || delay_rate_kbps <= 0.0) {
    throw ContractError("Combine: rates must be positive");
  }
  return std::min(loss_rate_kbps, delay_rate_kbps);
}

ResolutionTable::ResolutionTable(const std::vector<double>& thresholds_kbps) {
  if (thresholds_kbps.empty() ||
      thresholds_kbps.size() > static_cast<size_t>(codec::kNumResolutions)) {
    throw ContractError("ResolutionTable: need 1..4 thresholds");
  }
  for (size_t i = 0; i < thresholds_kbps.size(); ++i) {
    if (i > 0 && thresholds_kbps[i] <= thresholds_kbps[i - 1]) {
      throw ContractError("ResolutionTable: thresholds must increase");
    }
    entries_.emplace_back(thresholds_kbps[i],
                          static_cast<codec::Resolution>(i));
  }
}

codec::Resolution ResolutionTable::Map(double target_kbps) const {
  codec::Resolution best = entries_.front().second;
  for (const auto& [threshold, resolution] : entries_) {
    if (target_kbps >= threshold) best = resolution;
  }
  return best;
}

bool LeakyBucket::Step(double frame_bytes, double tick_s, double target_kbps) {
  if (target_kbps <= 0.0) throw ContractError("LeakyBucket: target <= 0");
  const double drain_bytes = target_kbps * 1000.0 / 8.0 * tick_s;
  level_bytes_ = std::max(0.0, level_bytes_ + frame_bytes - drain_bytes);
  return level_bytes_ > ThresholdBytes(target_kbps);
}

bool BucketFrameGate::ShouldEncode(double frame_time_s, double frame_interval_s) {
  (void)frame_time_s;
  const bool skip = bucket_->Step(0.0, frame_interval_s, target_kbps_);
  if (skip) ++skipped_;
  return !skip;
}

void BucketFrameGate::OnEncoded(int frame_bytes) {
  bucket_->Step(frame_bytes, 0.0, target_kbps_);
}

BaselineController::BaselineController(const GccParams& params, Mode mode,
                                       double interval_s,
                                       codec::Resolution fixed_resolution)
    : params_(params),
      mode_(mode),
      interval_s_(interval_s),
      fixed_resolution_(fixed_resolution),
      loss_(params),
      delay_(params),
      table_(params.resolution_thresholds_kbps),
      bucket_(params.bucket_threshold_intervals, interval_s),
      target_kbps_(params.initial_rate_kbps) {}

BaselineController::Decision BaselineController::Initial() const {
  Decision d;
  d.target_kbps = target_kbps_;
  d.resolution = mode_ == Mode::kResolutionAdaptation ? table_.Map(target_kbps_)
                                                      : fixed_resolution_;
  d.frame_rate = params_.capture_fps;
  return d;
}

BaselineController::Decision BaselineController::OnFeedback(
    const sim::LinkFeedback& feedback) {
  if (!feedback.stale) {
    const double loss_rate_out = loss_.Update(feedback.interval_loss_rate);
    double delay_rate_out = delay_.rate_kbps();
    if (!feedback.rtt_samples_s.empty()) {
      const double received_kbps =
          static_cast<double>(feedback.delivered_bytes) * 8.0 / 1000.0 / interval_s_;
      delay_rate_out = delay_.Update(feedback.rtt_samples_s, received_kbps);
    }
    target_kbps_ = Combine(loss_rate_out, delay_rate_out);
  }
  return Initial();
}

}  // namespace mabr::gcc
