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

#include "sim/feedback.h"

#include "common/error.h"

namespace mabr::sim {

LinkFeedback ComputeFeedback(const WindowRecords& window, double interval_s,
                             const LinkFeedback* prev) {
  if (interval_s <= 0.0) throw ContractError("ComputeFeedback: interval <= 0");

  LinkFeedback fb;
  if (window.sent_packets == 0 && window.deliveries.empty()) {
    if (prev != nullptr) {
      fb = *prev;
      fb.rtt_samples_s.clear();
      fb.delivered_bytes = 0;
    }
    fb.stale = true;
    return fb;
  }

  if (!window.deliveries.empty()) {
    double rtt_sum = 0.0;
    for (const Delivery& d : window.deliveries) {
      const double wait = d.service_start_s - d.enqueue_time_s;
      const double rtt = 2.0 * window.prop_delay_s + wait;
      fb.rtt_samples_s.push_back(rtt);
      rtt_sum += rtt;
      fb.delivered_bytes += d.packet.size_bytes;
    }
    fb.interval_rtt_mean_s = rtt_sum / static_cast<double>(fb.rtt_samples_s.size());
  } else if (prev != nullptr) {
    fb.interval_rtt_mean_s = prev->interval_rtt_mean_s;
  }

  fb.interval_loss_rate =
      window.sent_packets > 0
          ? static_cast<double>(window.dropped_packets) /
                static_cast<double>(window.sent_packets)
          : (prev != nullptr ? prev->interval_loss_rate : 0.0);

  if (!window.completions.empty()) {
    double delay_sum = 0.0;
    for (const FrameCompletion& fc : window.completions) {
      delay_sum += fc.completion_time_s - fc.capture_time_s;
    }
    fb.frame_delay_s = delay_sum / static_cast<double>(window.completions.size());
    fb.frame_delay_stale = false;
  } else {
    if (prev != nullptr) fb.frame_delay_s = prev->frame_delay_s;
    fb.frame_delay_stale = true;
  }
  return fb;
}

}  // namespace mabr::sim
