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

#ifndef MABR_SIM_FEEDBACK_H_
#define MABR_SIM_FEEDBACK_H_

#include <cstdint>
#include <vector>

#include "sim/channel.h"
#include "sim/receiver.h"

namespace mabr::sim {

// Interval-granularity receiver report, the RTCP stand-in.
struct LinkFeedback {
  double interval_rtt_mean_s = 0.0;
  double interval_loss_rate = 0.0;
  int64_t delivered_bytes = 0;
  double frame_delay_s = 0.0;  // mean completion - capture, carried when none
  bool stale = false;          // nothing was sent in the window
  bool frame_delay_stale = true;
  std::vector<double> rtt_samples_s;  // one per delivered packet
};

// Everything observed on the path during one feedback window.
struct WindowRecords {
  std::vector<Delivery> deliveries;
  std::vector<FrameCompletion> completions;
  int64_t sent_packets = 0;
  int64_t dropped_packets = 0;
  double prop_delay_s = 0.0;
};

// RTT per delivered packet is 2*prop + queue waiting time (time from joining
// the queue to first service); the feedback path is idle, so it adds only the
// return propagation. Loss is dropped/sent over the window. An empty window
// carries `prev` forward with the stale flag set.
LinkFeedback ComputeFeedback(const WindowRecords& window, double interval_s,
                             const LinkFeedback* prev);

}  // namespace mabr::sim

#endif  // MABR_SIM_FEEDBACK_H_
