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

#include "sim/session.h"

#include <algorithm>
#include <cmath>

#include "common/error.h"

namespace mabr::sim {

SessionParams SessionParams::FromConfig(const Config& config) {
  SessionParams p;
  p.tick_s = config.GetDouble("sim.tick_s");
  p.interval_s = config.GetDouble("sim.interval_s");
  p.mtu_bytes = config.GetInt("sim.mtu_bytes");
  p.queue_capacity_ms = config.GetDouble("sim.queue_capacity_ms");
  p.default_base_rtt_ms = config.GetDouble("sim.base_rtt_ms");
  p.default_loss_rate = config.GetDouble("sim.loss_rate");
  p.max_playback_fps = config.GetInt("sim.max_playback_fps");
  return p;
}

VideoSession::VideoSession(const trace::NetworkTrace& network,
                           const trace::ContentTrace& content,
                           const codec::RateQualityParams& codec_params,
                           const SessionParams& params, uint64_t seed)
    : network_(network),
      content_(content),
      params_(params),
      encoder_(codec_params, DeriveSeed(seed, "session-encoder")) {
  // One-way propagation is half the base RTT.
  const double base_rtt_ms =
      network.base_rtt_ms.value_or(params.default_base_rtt_ms);
  prop_delay_s_ = base_rtt_ms / 2000.0;
  const double loss = network.loss_rate.value_or(params.default_loss_rate);
  channel_ = std::make_unique<Channel>(prop_delay_s_, loss,
                                       params.queue_capacity_ms,
                                       DeriveSeed(seed, "session-channel"));
  receiver_ = std::make_unique<Receiver>();
}

void VideoSession::PeekContent(double* si, double* ti) const {
  content_.MeanOver(now_s(), now_s() + params_.interval_s, si, ti);
}

IntervalResult VideoSession::StepInterval(const codec::EncoderConfig& config,
                                          codec::FrameGate* gate) {
  const double start_s = now_s();
  const auto ticks = static_cast<int>(
      std::llround(params_.interval_s / params_.tick_s));
  if (ticks <= 0) throw ContractError("StepInterval: interval < tick");

  IntervalResult result;
  result.applied = config;
  content_.MeanOver(start_s, start_s + params_.interval_s, &result.si, &result.ti);

  // Sender side: produce this interval's frames up front; each frame's
  // packets are injected at the tick containing its capture time.
  const int slots = config.frame_rate > 0
                        ? static_cast<int>(std::floor(
                              config.frame_rate * params_.interval_s + 1e-9))
                        : 0;
  std::vector<codec::EncodedFrame> frames = encoder_.EncodeInterval(
      config, result.si, result.ti, start_s, params_.interval_s, gate);
  result.frames_encoded = static_cast<int>(frames.size());
  result.frames_skipped = slots - result.frames_encoded;

  int64_t encoded_bytes = 0;
  double quality_sum = 0.0;
  std::vector<std::vector<Packet>> arrivals(ticks);
  for (const codec::EncodedFrame& frame : frames) {
    encoded_bytes += frame.size_bytes;
    quality_sum += frame.quality;
    auto tick = static_cast<int>(
        std::floor((frame.capture_time_s - start_s) / params_.tick_s + 1e-9));
    tick = std::clamp(tick, 0, ticks - 1);
    std::vector<Packet> packets = Packetize(frame, params_.mtu_bytes);
    auto& bucket = arrivals[tick];
    bucket.insert(bucket.end(), packets.begin(), packets.end());
  }
  result.encoded_kbps = static_cast<double>(encoded_bytes) * 8.0 /
                        params_.interval_s / 1000.0;
  result.quality_mean =
      frames.empty() ? 0.0 : quality_sum / static_cast<double>(frames.size());

  // Channel + receiver, tick by tick.
  WindowRecords window;
  window.prop_delay_s = prop_delay_s_;
  const int64_t sent_before = channel_->sent_packets();
  const int64_t dropped_before = channel_->dropped_packets();
  int64_t dropped_prev_tick = dropped_before;
  for (int k = 0; k < ticks; ++k) {
    const double tick_start = static_cast<double>(tick_index_) * params_.tick_s;
    channel_->set_bandwidth_kbps(network_.BandwidthAt(tick_start));
    std::vector<Delivery> delivered =
        channel_->Step(tick_start, params_.tick_s, arrivals[k]);
    std::vector<FrameCompletion> completions = receiver_->Ingest(delivered);
    if (event_log_ != nullptr) {
      *event_log_ << tick_index_ << ',' << channel_->queue_bytes() << ','
                  << delivered.size() << ','
                  << (channel_->dropped_packets() - dropped_prev_tick) << '\n';
      dropped_prev_tick = channel_->dropped_packets();
    }
    window.deliveries.insert(window.deliveries.end(), delivered.begin(),
                             delivered.end());
    window.completions.insert(window.completions.end(), completions.begin(),
                              completions.end());
    ++tick_index_;
  }
  window.sent_packets = channel_->sent_packets() - sent_before;
  window.dropped_packets = channel_->dropped_packets() - dropped_before;

  result.feedback = ComputeFeedback(window, params_.interval_s,
                                    has_prev_feedback_ ? &prev_feedback_ : nullptr);
  prev_feedback_ = result.feedback;
  has_prev_feedback_ = true;

  const int played = receiver_->TakePlayedCount();
  const double fps_cap = static_cast<double>(params_.max_playback_fps);
  result.playback_fps = std::min(
      static_cast<double>(played) / params_.interval_s, fps_cap);
  result.interval_end_s = now_s();
  return result;
}

}  // namespace mabr::sim
