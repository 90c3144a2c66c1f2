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

#ifndef MABR_SIM_CHANNEL_H_
#define MABR_SIM_CHANNEL_H_

#include <cstdint>
#include <deque>
#include <vector>

#include "common/rng.h"
#include "sim/packet.h"

namespace mabr::sim {

// One packet leaving the bottleneck, with its full service timeline.
struct Delivery {
  Packet packet;
  double enqueue_time_s = 0.0;    // when it joined the queue (tick boundary)
  double service_start_s = 0.0;   // first bit on the wire
  double completion_s = 0.0;      // last bit off the bottleneck
  double deliver_time_s = 0.0;    // completion + propagation delay
};

// Trace-driven bottleneck: FIFO drop-tail queue drained at the current
// bandwidth, fixed one-way propagation delay, optional i.i.d. random loss
// applied at enqueue. Service state carries across ticks, so a packet
// spanning a tick boundary finishes exactly when its bits are paid for.
//
// Per tick the order is: drain up to bandwidth*tick bits from the head, then
// enqueue arrivals (drop-tail against the capacity, then random loss).
// Arrivals therefore never drain in their own arrival tick; their
// enqueue_time is the end-of-tick boundary.
class Channel {
 public:
  Channel(double prop_delay_s, double random_loss, double capacity_ms,
          uint64_t seed);

  void set_bandwidth_kbps(double kbps) { bandwidth_kbps_ = kbps; }
  double bandwidth_kbps() const { return bandwidth_kbps_; }
  double prop_delay_s() const { return prop_delay_s_; }

  std::vector<Delivery> Step(double now_s, double tick_s,
                             const std::vector<Packet>& arrivals);

  int64_t queue_bytes() const { return queue_bytes_; }
  // Conservation counters: injected = delivered + dropped + queued.
  int64_t injected_bytes() const { return injected_bytes_; }
  int64_t delivered_bytes() const { return delivered_bytes_; }
  int64_t dropped_bytes() const { return dropped_bytes_; }
  int64_t sent_packets() const { return sent_packets_; }
  int64_t dropped_packets() const { return dropped_packets_; }
  int64_t delivered_packets() const { return delivered_packets_; }

 private:
  struct Queued {
    Packet packet;
    double enqueue_time_s;
    double service_start_s = -1.0;
    double bits_served = 0.0;
  };

  double CapacityBytes() const {
    return bandwidth_kbps_ * capacity_ms_ / 8.0;
  }

  double bandwidth_kbps_ = 0.0;
  double prop_delay_s_;
  double random_loss_;
  double capacity_ms_;
  Rng rng_;

  std::deque<Queued> queue_;
  int64_t queue_bytes_ = 0;
  int64_t injected_bytes_ = 0;
  int64_t delivered_bytes_ = 0;
  int64_t dropped_bytes_ = 0;
  int64_t sent_packets_ = 0;
  int64_t dropped_packets_ = 0;
  int64_t delivered_packets_ = 0;
};

}  // namespace mabr::sim

#endif  // MABR_SIM_CHANNEL_H_
