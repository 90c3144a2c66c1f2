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

#include "sim/channel.h"

#include <cmath>

#include "common/error.h"

namespace mabr::sim {

std::vector<Packet> Packetize(const codec::EncodedFrame& frame, int mtu_bytes) {
  if (frame.size_bytes <= 0) throw ContractError("Packetize: empty frame");
  if (mtu_bytes <= 0) throw ContractError("Packetize: mtu <= 0");
  const int count = (frame.size_bytes + mtu_bytes - 1) / mtu_bytes;
  std::vector<Packet> packets;
  packets.reserve(count);
  for (int i = 0; i < count; ++i) {
    Packet p;
    p.frame_id = frame.frame_id;
    p.index_in_frame = i;
    p.packets_in_frame = count;
    p.size_bytes = (i + 1 < count)
                       ? mtu_bytes
                       : frame.size_bytes - (count - 1) * mtu_bytes;
    p.send_time_s = frame.capture_time_s;
    p.capture_time_s = frame.capture_time_s;
    p.keyframe = frame.keyframe;
    packets.push_back(p);
  }
  return packets;
}

Channel::Channel(double prop_delay_s, double random_loss, double capacity_ms,
                 uint64_t seed)
    : prop_delay_s_(prop_delay_s),
      random_loss_(random_loss),
      capacity_ms_(capacity_ms),
      rng_(DeriveSeed(seed, "channel-loss")) {}

std::vector<Delivery> Channel::Step(double now_s, double tick_s,
                                    const std::vector<Packet>& arrivals) {
  if (tick_s <= 0.0) throw ContractError("Channel::Step: tick <= 0");
  std::vector<Delivery> delivered;

  // Drain phase. The head packet may already be partially served.
  const double rate_bps = bandwidth_kbps_ * 1000.0;
  if (rate_bps > 0.0) {
    double budget_bits = rate_bps * tick_s;
    double cursor_s = now_s;
    while (!queue_.empty() && budget_bits > 0.0) {
      Queued& head = queue_.front();
      if (head.service_start_s < 0.0) head.service_start_s = cursor_s;
      const double remaining_bits =
          static_cast<double>(head.packet.size_bytes) * 8.0 - head.bits_served;
      if (remaining_bits <= budget_bits + 1e-9) {
        cursor_s += remaining_bits / rate_bps;
        budget_bits -= remaining_bits;
        Delivery d;
        d.packet = head.packet;
        d.enqueue_time_s = head.enqueue_time_s;
        d.service_start_s = head.service_start_s;
        d.completion_s = cursor_s;
        d.deliver_time_s = cursor_s + prop_delay_s_;
        delivered.push_back(d);
        queue_bytes_ -= head.packet.size_bytes;
        delivered_bytes_ += head.packet.size_bytes;
        ++delivered_packets_;
        queue_.pop_front();
      } else {
        head.bits_served += budget_bits;
        budget_bits = 0.0;
      }
    }
  }

  // Enqueue phase: drop-tail against the current capacity, then random loss.
  const double end_of_tick = now_s + tick_s;
  const double capacity = CapacityBytes();
  for (const Packet& p : arrivals) {
    ++sent_packets_;
    injected_bytes_ += p.size_bytes;
    if (static_cast<double>(queue_bytes_ + p.size_bytes) > capacity) {
      ++dropped_packets_;
      dropped_bytes_ += p.size_bytes;
      continue;
    }
    if (random_loss_ > 0.0 && rng_.Bernoulli(random_loss_)) {
      ++dropped_packets_;
      dropped_bytes_ += p.size_bytes;
      continue;
    }
    Queued q;
    q.packet = p;
    q.enqueue_time_s = end_of_tick;
    queue_.push_back(q);
    queue_bytes_ += p.size_bytes;
  }
  return delivered;
}

}  // namespace mabr::sim
