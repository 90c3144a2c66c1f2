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

#ifndef MABR_SIM_SESSION_H_
#define MABR_SIM_SESSION_H_

#include <memory>
#include <ostream>
#include <vector>

#include "codec/codec.h"
#include "common/config.h"
#include "sim/channel.h"
#include "sim/feedback.h"
#include "sim/receiver.h"
#include "trace/traces.h"

namespace mabr::sim {

struct SessionParams {
  double tick_s = 0.01;
  double interval_s = 0.1;
  int mtu_bytes = 1200;
  double queue_capacity_ms = 500.0;
  double default_base_rtt_ms = 40.0;
  double default_loss_rate = 0.0;
  int max_playback_fps = 60;

  static SessionParams FromConfig(const Config& config);
};

// What one 0.1 s control interval produced. This is the raw material for
// QoE records, observations, and rewards.
struct IntervalResult {
  LinkFeedback feedback;
  double encoded_kbps = 0.0;
  double quality_mean = 0.0;  // over frames encoded this interval, 0 if none
  int frames_encoded = 0;
  int frames_skipped = 0;
  double playback_fps = 0.0;  // capped at max_playback_fps
  double si = 0.0;
  double ti = 0.0;
  codec::EncoderConfig applied;
  double interval_end_s = 0.0;
};

// One sender->receiver video session over a bandwidth trace. Strictly
// single-threaded; run many instances in parallel for rollouts.
//
// Interval flow: encode the interval's frames at the given config, inject
// each frame's packets at its capture tick, advance the bottleneck tick by
// tick, assemble and play frames at the receiver, then summarize feedback.
class VideoSession {
 public:
  VideoSession(const trace::NetworkTrace& network,
               const trace::ContentTrace& content,
               const codec::RateQualityParams& codec_params,
               const SessionParams& params, uint64_t seed);

  IntervalResult StepInterval(const codec::EncoderConfig& config,
                              codec::FrameGate* gate = nullptr);

  double now_s() const { return static_cast<double>(tick_index_) * params_.tick_s; }
  double prop_delay_s() const { return prop_delay_s_; }
  // Content complexity over the upcoming interval; the sender sees the frames
  // it is about to encode, so this is locally available.
  void PeekContent(double* si, double* ti) const;

  const Channel& channel() const { return *channel_; }
  const Receiver& receiver() const { return *receiver_; }

  // Optional per-tick event log: `tick,queue_bytes,delivered,dropped` CSV.
  void set_event_log(std::ostream* sink) { event_log_ = sink; }

 private:
  const trace::NetworkTrace& network_;
  const trace::ContentTrace& content_;
  SessionParams params_;
  double prop_delay_s_;
  codec::Encoder encoder_;
  std::unique_ptr<Channel> channel_;
  std::unique_ptr<Receiver> receiver_;
  LinkFeedback prev_feedback_;
  bool has_prev_feedback_ = false;
  int64_t tick_index_ = 0;
  std::ostream* event_log_ = nullptr;
};

}  // namespace mabr::sim

#endif  // MABR_SIM_SESSION_H_
