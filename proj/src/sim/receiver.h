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

#ifndef MABR_SIM_RECEIVER_H_
#define MABR_SIM_RECEIVER_H_

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "sim/channel.h"

namespace mabr::sim {

// A frame whose packet set just completed at the receiver.
struct FrameCompletion {
  int64_t frame_id = 0;
  double capture_time_s = 0.0;
  double completion_time_s = 0.0;  // arrival of the last packet
  bool played = false;
};

// Frame assembly and strict decode-order playback. A frame becomes playable
// only once all of its packets have arrived and every prior frame was
// decodable; a completed keyframe resets the chain (it decodes without
// references, so playback jumps forward and everything older is discarded).
// There is no retransmission: a frame missing any packet is never played.
class Receiver {
 public:
  Receiver() = default;

  // Feeds one tick's deliveries. Returns the frames completed by them, with
  // played flags reflecting the decode-order rule.
  std::vector<FrameCompletion> Ingest(const std::vector<Delivery>& deliveries);

  // Played-frame count since the last call (the playback-rate numerator).
  int TakePlayedCount();

  int64_t last_decodable_frame() const { return next_needed_ - 1; }
  int64_t frames_played_total() const { return frames_played_total_; }

 private:
  struct Assembly {
    std::set<int> arrived;
    int packets_in_frame = 0;
    double capture_time_s = 0.0;
    double last_arrival_s = 0.0;
    bool keyframe = false;
  };

  void Play(int64_t frame_id);

  std::map<int64_t, Assembly> pending_;
  // Complete but blocked by a gap; values are completion metadata.
  std::map<int64_t, FrameCompletion> blocked_;
  int64_t next_needed_ = 0;
  int played_since_take_ = 0;
  int64_t frames_played_total_ = 0;
};

}  // namespace mabr::sim

#endif  // MABR_SIM_RECEIVER_H_
