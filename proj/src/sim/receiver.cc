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

#include "sim/receiver.h"

namespace mabr::sim {

void Receiver::Play(int64_t frame_id) {
  next_needed_ = frame_id + 1;
  ++played_since_take_;
  ++frames_played_total_;
}

std::vector<FrameCompletion> Receiver::Ingest(
    const std::vector<Delivery>& deliveries) {
  std::vector<FrameCompletion> completed;
  for (const Delivery& d : deliveries) {
    const Packet& p = d.packet;
    Assembly& a = pending_[p.frame_id];
    a.packets_in_frame = p.packets_in_frame;
    a.capture_time_s = p.capture_time_s;
    a.keyframe = p.keyframe;
    a.arrived.insert(p.index_in_frame);
    a.last_arrival_s = std::max(a.last_arrival_s, d.deliver_time_s);
    if (static_cast<int>(a.arrived.size()) < a.packets_in_frame) continue;

    FrameCompletion fc;
    fc.frame_id = p.frame_id;
    fc.capture_time_s = a.capture_time_s;
    fc.completion_time_s = a.last_arrival_s;
    const bool keyframe = a.keyframe;
    pending_.erase(p.frame_id);

    if (fc.frame_id < next_needed_) {
      // Superseded; traversed the network but will never be shown.
      fc.played = false;
    } else if (fc.frame_id == next_needed_) {
      Play(fc.frame_id);
      fc.played = true;
    } else if (keyframe) {
      // Intra-coded frame decodes without references: jump forward and drop
      // everything older.
      blocked_.erase(blocked_.begin(), blocked_.lower_bound(fc.frame_id));
      pending_.erase(pending_.begin(), pending_.lower_bound(fc.frame_id));
      Play(fc.frame_id);
      fc.played = true;
    } else {
      blocked_[fc.frame_id] = fc;
    }

    // Chain through frames that were complete but waiting on the gap.
    while (!blocked_.empty() && blocked_.begin()->first == next_needed_) {
      Play(blocked_.begin()->first);
      blocked_.erase(blocked_.begin());
    }
    completed.push_back(fc);
  }
  return completed;
}

int Receiver::TakePlayedCount() {
  const int count = played_since_take_;
  played_since_take_ = 0;
  return count;
}

}  // namespace mabr::sim
