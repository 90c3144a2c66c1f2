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

#include <doctest.h>

#include <sstream>

#include "common/rng.h"
#include "sim/feedback.h"
#include "sim/session.h"

using namespace mabr;

namespace {

codec::EncodedFrame MakeFrame(int64_t id, int bytes, double capture = 0.0,
                              bool keyframe = false) {
  codec::EncodedFrame f;
  f.frame_id = id;
  f.capture_time_s = capture;
  f.size_bytes = bytes;
  f.keyframe = keyframe;
  return f;
}

std::vector<sim::Packet> FramePackets(int64_t id, int count,
                                      bool keyframe = false) {
  return sim::Packetize(MakeFrame(id, count * 1000, 0.0, keyframe), 1000);
}

sim::Delivery MakeDelivery(double enqueue, double service_start,
                           double completion, double prop, int bytes = 1000) {
  sim::Delivery d;
  d.packet.size_bytes = bytes;
  d.enqueue_time_s = enqueue;
  d.service_start_s = service_start;
  d.completion_s = completion;
  d.deliver_time_s = completion + prop;
  return d;
}

}  // namespace

TEST_CASE("packetize splits on the mtu") {
  const auto packets = sim::Packetize(MakeFrame(0, 3000), 1200);
  REQUIRE(packets.size() == 3);
  CHECK(packets[0].size_bytes == 1200);
  CHECK(packets[1].size_bytes == 1200);
  CHECK(packets[2].size_bytes == 600);
  for (const auto& p : packets) {
    CHECK(p.packets_in_frame == 3);
    CHECK(p.index_in_frame < p.packets_in_frame);
  }
}

TEST_CASE("packetize minimal and exact-fit frames") {
  CHECK(sim::Packetize(MakeFrame(0, 1), 1200).size() == 1);
  CHECK(sim::Packetize(MakeFrame(0, 1), 1200)[0].size_bytes == 1);
  CHECK(sim::Packetize(MakeFrame(0, 1200), 1200).size() == 1);
}

TEST_CASE("idle channel is the identity") {
  sim::Channel channel(0.02, 0.0, 500.0, 1);
  channel.set_bandwidth_kbps(8000.0);
  const auto delivered = channel.Step(0.0, 0.01, {});
  CHECK(delivered.empty());
  CHECK(channel.queue_bytes() == 0);
}

TEST_CASE("drain is exactly bandwidth times tick") {
  sim::Channel channel(0.0, 0.0, 1e9, 1);
  channel.set_bandwidth_kbps(8000.0);
  // 200 kB of 1000-byte packets.
  std::vector<sim::Packet> arrivals;
  for (int i = 0; i < 200; ++i) {
    sim::Packet p;
    p.frame_id = i;
    p.size_bytes = 1000;
    arrivals.push_back(p);
  }
  channel.Step(0.0, 0.01, arrivals);  // enqueue only
  REQUIRE(channel.queue_bytes() == 200000);
  const auto delivered = channel.Step(0.01, 0.1, {});
  // 8000 kbps * 0.1 s = 800 kbit = 100 kB
  CHECK(delivered.size() == 100);
  CHECK(channel.delivered_bytes() == 100000);
  CHECK(channel.queue_bytes() == 100000);
}

TEST_CASE("full random loss delivers nothing") {
  sim::Channel channel(0.0, 1.0, 1e9, 1);
  channel.set_bandwidth_kbps(8000.0);
  channel.Step(0.0, 0.01, FramePackets(0, 5));
  const auto delivered = channel.Step(0.01, 1.0, {});
  CHECK(delivered.empty());
  CHECK(channel.dropped_packets() == 5);
}

TEST_CASE("byte conservation holds under random traffic") {
  Rng rng(99);
  for (int round = 0; round < 100; ++round) {
    sim::Channel channel(0.01, 0.05 * rng.Uniform(), 100.0 + 400.0 * rng.Uniform(),
                         round);
    int64_t frame = 0;
    for (int tick = 0; tick < 200; ++tick) {
      channel.set_bandwidth_kbps(500.0 + 9500.0 * rng.Uniform());
      std::vector<sim::Packet> arrivals;
      const int n = static_cast<int>(rng.UniformInt(6));
      for (int i = 0; i < n; ++i) {
        sim::Packet p;
        p.frame_id = frame++;
        p.size_bytes = 200 + static_cast<int>(rng.UniformInt(1000));
        arrivals.push_back(p);
      }
      channel.Step(tick * 0.01, 0.01, arrivals);
      CHECK(channel.injected_bytes() == channel.delivered_bytes() +
                                            channel.dropped_bytes() +
                                            channel.queue_bytes());
    }
  }
}

TEST_CASE("work conservation while the queue is backlogged") {
  Rng rng(7);
  sim::Channel channel(0.0, 0.0, 1e12, 1);
  channel.set_bandwidth_kbps(1000.0);  // capacity follows bandwidth
  // Enqueue a large backlog, then drain under varying bandwidth.
  std::vector<sim::Packet> arrivals;
  for (int i = 0; i < 2000; ++i) {
    sim::Packet p;
    p.frame_id = i;
    p.size_bytes = 1200;
    arrivals.push_back(p);
  }
  channel.Step(0.0, 0.01, arrivals);
  double expected_bits = 0.0;
  for (int tick = 1; tick <= 100; ++tick) {
    const double kbps = 1000.0 + 9000.0 * rng.Uniform();
    channel.set_bandwidth_kbps(kbps);
    channel.Step(tick * 0.01, 0.01, {});
    expected_bits += kbps * 1000.0 * 0.01;
    REQUIRE(channel.queue_bytes() > 0);  // stays backlogged throughout
    const double drained_bits =
        static_cast<double>(channel.delivered_bytes()) * 8.0;
    // Within one packet of slack: the head may be partially served.
    CHECK(std::abs(drained_bits - expected_bits) <= 1200.0 * 8.0);
  }
}

TEST_CASE("complete frames play in decode order") {
  sim::Receiver receiver;
  sim::Channel channel(0.0, 0.0, 1e9, 1);
  channel.set_bandwidth_kbps(80000.0);
  channel.Step(0.0, 0.01, FramePackets(0, 3));
  const auto completed = receiver.Ingest(channel.Step(0.01, 0.05, {}));
  REQUIRE(completed.size() == 1);
  CHECK(completed[0].frame_id == 0);
  CHECK(completed[0].played);
  CHECK(receiver.TakePlayedCount() == 1);
}

TEST_CASE("a gap blocks later non-key frames") {
  sim::Receiver receiver;
  // Frame 1 misses packet 1 of 2; frame 2 arrives complete.
  std::vector<sim::Delivery> deliveries;
  {
    auto packets = FramePackets(1, 2);
    sim::Delivery d;
    d.packet = packets[0];
    d.deliver_time_s = 0.02;
    deliveries.push_back(d);
  }
  for (const auto& p : FramePackets(2, 2)) {
    sim::Delivery d;
    d.packet = p;
    d.deliver_time_s = 0.03;
    deliveries.push_back(d);
  }
  // Frame 0 plays fine first.
  for (const auto& p : FramePackets(0, 1)) {
    sim::Delivery d;
    d.packet = p;
    d.deliver_time_s = 0.01;
    deliveries.insert(deliveries.begin(), d);
  }
  const auto completed = receiver.Ingest(deliveries);
  // Frames 0 and 2 completed; only 0 played (frame 1 has a hole).
  REQUIRE(completed.size() == 2);
  CHECK(completed[0].frame_id == 0);
  CHECK(completed[0].played);
  CHECK(completed[1].frame_id == 2);
  CHECK_FALSE(completed[1].played);
  CHECK(receiver.TakePlayedCount() == 1);
  CHECK(receiver.last_decodable_frame() == 0);
}

TEST_CASE("a completed keyframe resets the decode chain") {
  sim::Receiver receiver;
  std::vector<sim::Delivery> deliveries;
  for (const auto& p : FramePackets(0, 1)) {
    sim::Delivery d;
    d.packet = p;
    d.deliver_time_s = 0.01;
    deliveries.push_back(d);
  }
  receiver.Ingest(deliveries);
  // Frame 1 lost entirely; frame 5 is a keyframe and arrives complete.
  std::vector<sim::Delivery> later;
  for (const auto& p : FramePackets(5, 2, /*keyframe=*/true)) {
    sim::Delivery d;
    d.packet = p;
    d.deliver_time_s = 0.10;
    later.push_back(d);
  }
  const auto completed = receiver.Ingest(later);
  REQUIRE(completed.size() == 1);
  CHECK(completed[0].played);
  CHECK(receiver.last_decodable_frame() == 5);
}

TEST_CASE("no deliveries means zero playback") {
  sim::Receiver receiver;
  receiver.Ingest({});
  CHECK(receiver.TakePlayedCount() == 0);
}

TEST_CASE("idle link feedback is twice the propagation delay") {
  sim::WindowRecords window;
  window.prop_delay_s = 0.02;
  window.sent_packets = 1;
  window.deliveries.push_back(MakeDelivery(0.01, 0.01, 0.011, 0.02));
  const sim::LinkFeedback fb = sim::ComputeFeedback(window, 0.1, nullptr);
  CHECK(fb.interval_rtt_mean_s == doctest::Approx(0.04).epsilon(1e-12));
  CHECK_FALSE(fb.stale);
}

TEST_CASE("loss rate is dropped over sent") {
  sim::WindowRecords window;
  window.prop_delay_s = 0.02;
  window.sent_packets = 10;
  window.dropped_packets = 1;
  window.deliveries.push_back(MakeDelivery(0.01, 0.01, 0.011, 0.02));
  const sim::LinkFeedback fb = sim::ComputeFeedback(window, 0.1, nullptr);
  CHECK(fb.interval_loss_rate == doctest::Approx(0.1));
}

TEST_CASE("queue backlog adds its wait to the rtt") {
  sim::WindowRecords window;
  window.prop_delay_s = 0.02;
  window.sent_packets = 1;
  // 100 kB ahead at 8000 kbps = 100 ms of waiting.
  window.deliveries.push_back(MakeDelivery(0.0, 0.1, 0.101, 0.02));
  const sim::LinkFeedback fb = sim::ComputeFeedback(window, 0.1, nullptr);
  CHECK(fb.interval_rtt_mean_s == doctest::Approx(0.14).epsilon(1e-9));
}

TEST_CASE("empty window carries previous values and flags stale") {
  sim::LinkFeedback prev;
  prev.interval_rtt_mean_s = 0.05;
  prev.interval_loss_rate = 0.2;
  prev.frame_delay_s = 0.07;
  sim::WindowRecords window;
  window.prop_delay_s = 0.02;
  const sim::LinkFeedback fb = sim::ComputeFeedback(window, 0.1, &prev);
  CHECK(fb.stale);
  CHECK(fb.interval_rtt_mean_s == doctest::Approx(0.05));
  CHECK(fb.interval_loss_rate == doctest::Approx(0.2));
  CHECK(fb.frame_delay_s == doctest::Approx(0.07));
}

TEST_CASE("sessions are deterministic tick for tick") {
  const trace::NetworkTrace net = trace::MakeStepTrace(6000, 2500, 5.0, 10.0);
  Config config;
  const auto content = trace::SynthesizeContentTrace(
      trace::ContentProfile::kGaming, 10.0, 3, config);
  const codec::RateQualityParams codec_params;
  const sim::SessionParams params;

  const auto run = [&](std::ostream* log) {
    sim::VideoSession session(net, content, codec_params, params, 42);
    session.set_event_log(log);
    codec::EncoderConfig cfg;
    cfg.rate_factor = 20;
    cfg.resolution = codec::Resolution::k1080p;
    cfg.frame_rate = 30;
    for (int i = 0; i < 80; ++i) session.StepInterval(cfg);
  };
  std::ostringstream log_a, log_b;
  run(&log_a);
  run(&log_b);
  CHECK(log_a.str() == log_b.str());
  CHECK(log_a.str().size() > 0);
}

TEST_CASE("playback never exceeds frames sent and delay includes propagation") {
  const trace::NetworkTrace net = trace::MakeStepTrace(5000, 5000, 1.0, 12.0);
  Config config;
  const auto content = trace::SynthesizeContentTrace(
      trace::ContentProfile::kConferencing, 12.0, 4, config);
  const codec::RateQualityParams codec_params;
  sim::SessionParams params;
  sim::VideoSession session(net, content, codec_params, params, 7);

  codec::EncoderConfig cfg;
  cfg.rate_factor = 26;
  cfg.frame_rate = 30;
  int64_t sent = 0;
  for (int i = 0; i < 100; ++i) {
    const sim::IntervalResult r = session.StepInterval(cfg);
    sent += r.frames_encoded;
    if (!r.feedback.frame_delay_stale) {
      CHECK(r.feedback.frame_delay_s >= session.prop_delay_s());
    }
  }
  CHECK(session.receiver().frames_played_total() <= sent);
  CHECK(session.receiver().frames_played_total() > 0);
}
