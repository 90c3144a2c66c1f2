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

#ifndef MABR_SIM_PACKET_H_
#define MABR_SIM_PACKET_H_

#include <cstdint>
#include <vector>

#include "codec/codec.h"

namespace mabr::sim {

struct Packet {
  int64_t frame_id = 0;
  int index_in_frame = 0;
  int packets_in_frame = 1;
  int size_bytes = 0;
  double send_time_s = 0.0;     // injection into the channel
  double capture_time_s = 0.0;  // the frame's capture timestamp
  bool keyframe = false;
};

// Splits a frame into ceil(size/mtu) packets; all but the last carry exactly
// mtu bytes.
std::vector<Packet> Packetize(const codec::EncodedFrame& frame, int mtu_bytes);

}  // namespace mabr::sim

#endif  // MABR_SIM_PACKET_H_
