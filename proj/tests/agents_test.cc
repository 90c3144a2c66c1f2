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

#include "agents/agents.h"
#include "common/error.h"

using namespace mabr;
using agents::AgentKind;
using agents::AgentObservation;
using agents::HistoryBuffer;
using agents::IntervalRecord;

namespace {

IntervalRecord SteadyRecord(double t_end) {
  IntervalRecord r;
  r.si = 60.0;
  r.ti = 12.0;
  r.rate_factor = 23.0;
  r.resolution_fraction = codec::PixelFraction(codec::Resolution::k1080p);
  r.encode_fps = 30.0;
  r.playback_fps = 30.0;
  r.rtt_s = 0.04;
  r.loss_rate = 0.0;
  r.t_end_s = t_end;
  return r;
}

}  // namespace

TEST_CASE("episode start observations are all zero") {
  HistoryBuffer history{agents::AgentNorms{}};
  const AgentObservation obs = history.Assemble(AgentKind::kQua);
  for (int f = 0; f < agents::kNumFeatures; ++f) {
    for (int k = 0; k < agents::kHistoryLen; ++k) {
      CHECK(obs.features[f][k] == 0.0);
    }
  }
}

TEST_CASE("steady history normalizes the rate factor to 23/51") {
  HistoryBuffer history{agents::AgentNorms{}};
  for (int i = 0; i < 6; ++i) history.Append(SteadyRecord(0.1 * (i + 1)));
  const AgentObservation obs = history.Assemble(AgentKind::kQua);
  for (int k = 0; k < agents::kHistoryLen; ++k) {
    CHECK(obs.features[agents::kFeatRateFactor][k] ==
          doctest::Approx(23.0 / 51.0).epsilon(1e-12));
  }
  CHECK(obs.timestamp_s == doctest::Approx(0.6));
}

TEST_CASE("normalized features stay inside the unit interval") {
  HistoryBuffer history{agents::AgentNorms{}};
  IntervalRecord extreme;
  extreme.si = 500.0;
  extreme.ti = 400.0;
  extreme.rate_factor = 51.0;
  extreme.resolution_fraction = 1.0;
  extreme.encode_fps = 60.0;
  extreme.playback_fps = 90.0;  // burst beyond the cap
  extreme.rtt_s = 3.5;
  extreme.loss_rate = 1.0;
  extreme.t_end_s = 0.1;
  history.Append(extreme);
  const AgentObservation obs = history.Assemble(AgentKind::kQua);
  for (int f = 0; f < agents::kNumFeatures; ++f) {
    for (int k = 0; k < agents::kHistoryLen; ++k) {
      CHECK(obs.features[f][k] >= 0.0);
      CHECK(obs.features[f][k] <= 1.0);
    }
  }
}

TEST_CASE("the res window spans ten times the wall time") {
  HistoryBuffer history{agents::AgentNorms{}};
  // 60 intervals with rising SI; res window block k must average block k of
  // ten records.
  for (int i = 0; i < 60; ++i) {
    IntervalRecord r = SteadyRecord(0.1 * (i + 1));
    r.si = static_cast<double>(i);
    history.Append(r);
  }
  const AgentObservation obs = history.Assemble(AgentKind::kRes);
  for (int k = 0; k < agents::kHistoryLen; ++k) {
    const double expected = (10.0 * k + 4.5) / 100.0;  // mean of i in block / norm
    CHECK(obs.features[agents::kFeatSi][k] == doctest::Approx(expected).epsilon(1e-9));
  }
  // The qua window only sees the last six records.
  const AgentObservation qua = history.Assemble(AgentKind::kQua);
  CHECK(qua.features[agents::kFeatSi][0] == doctest::Approx(54.0 / 100.0));
  CHECK(qua.features[agents::kFeatSi][5] == doctest::Approx(59.0 / 100.0));
}

TEST_CASE("rate-factor deltas clamp at the extremes") {
  codec::EncoderConfig cfg;
  cfg.rate_factor = 23;
  const auto up = agents::ApplyAction(AgentKind::kQua, 0, cfg);  // +8
  CHECK(up.rate_factor == 31);
  cfg.rate_factor = 50;
  CHECK(agents::ApplyAction(AgentKind::kQua, 0, cfg).rate_factor == 51);
  cfg.rate_factor = 1;
  CHECK(agents::ApplyAction(AgentKind::kQua, 6, cfg).rate_factor == 0);  // -4
}

TEST_CASE("frame-rate action zero pauses capture") {
  codec::EncoderConfig cfg;
  cfg.frame_rate = 30;
  const auto paused = agents::ApplyAction(AgentKind::kFr, 6, cfg);
  CHECK(paused.frame_rate == 0);
  const auto resumed = agents::ApplyAction(AgentKind::kFr, 0, paused);
  CHECK(resumed.frame_rate == 60);
}

TEST_CASE("out-of-space actions are rejected") {
  codec::EncoderConfig cfg;
  CHECK_THROWS_AS(agents::ApplyAction(AgentKind::kQua, 7, cfg), ContractError);
  CHECK_THROWS_AS(agents::ApplyAction(AgentKind::kRes, 4, cfg), ContractError);
  CHECK_THROWS_AS(agents::ApplyAction(AgentKind::kFr, -1, cfg), ContractError);
}

TEST_CASE("foundation masking blinds the foreign factors only") {
  HistoryBuffer history{agents::AgentNorms{}};
  for (int i = 0; i < 6; ++i) history.Append(SteadyRecord(0.1 * (i + 1)));
  const AgentObservation plain = history.Assemble(AgentKind::kQua);
  const AgentObservation masked =
      agents::MaskForFoundation(AgentKind::kQua, plain);

  CHECK(masked.mask[agents::kFeatResolution]);
  CHECK(masked.mask[agents::kFeatEncodeFps]);
  for (int k = 0; k < agents::kHistoryLen; ++k) {
    CHECK(masked.features[agents::kFeatResolution][k] == 0.0);
    CHECK(masked.features[agents::kFeatEncodeFps][k] == 0.0);
  }
  // Unmasked features are bit-identical.
  for (int f = 0; f < agents::kNumFeatures; ++f) {
    if (f == agents::kFeatResolution || f == agents::kFeatEncodeFps) continue;
    CHECK_FALSE(masked.mask[f]);
    for (int k = 0; k < agents::kHistoryLen; ++k) {
      CHECK(masked.features[f][k] == plain.features[f][k]);
    }
  }
  // Idempotent.
  const AgentObservation twice =
      agents::MaskForFoundation(AgentKind::kQua, masked);
  for (int f = 0; f < agents::kNumFeatures; ++f) {
    for (int k = 0; k < agents::kHistoryLen; ++k) {
      CHECK(twice.features[f][k] == masked.features[f][k]);
    }
  }
}

TEST_CASE("each agent masks the other two factors") {
  using agents::FoundationMaskedFeatures;
  CHECK(FoundationMaskedFeatures(AgentKind::kQua) ==
        std::vector<int>{agents::kFeatResolution, agents::kFeatEncodeFps});
  CHECK(FoundationMaskedFeatures(AgentKind::kFr) ==
        std::vector<int>{agents::kFeatResolution, agents::kFeatRateFactor});
  CHECK(FoundationMaskedFeatures(AgentKind::kRes) ==
        std::vector<int>{agents::kFeatEncodeFps, agents::kFeatRateFactor});
}

TEST_CASE("the global state has the documented fixed layout") {
  CHECK(agents::GlobalState::kLength == 162);  // 3*48 + 7 + 4 + 7

  AgentObservation qua, res, fr;
  qua.features[agents::kFeatSi][2] = 0.5;
  res.features[agents::kFeatLoss][5] = 0.25;
  fr.features[agents::kFeatRtt][0] = 0.125;

  const agents::GlobalState gs =
      agents::BuildGlobalState(qua, res, fr, 3, 1, 0);
  CHECK(gs.data.size() == 162);
  // qua block at 0, feature-major: si is feature 0, step 2.
  CHECK(gs.data[0 * 48 + agents::kFeatSi * 6 + 2] == 0.5);
  CHECK(gs.data[1 * 48 + agents::kFeatLoss * 6 + 5] == 0.25);
  CHECK(gs.data[2 * 48 + agents::kFeatRtt * 6 + 0] == 0.125);
  // One-hots: qua action 3 at 144+3, res action 1 at 151+1, fr action 0 at 155.
  CHECK(gs.data[144 + 3] == 1.0);
  CHECK(gs.data[144 + 7 + 1] == 1.0);
  CHECK(gs.data[144 + 7 + 4 + 0] == 1.0);
  double sum = gs.data.sum();
  CHECK(sum == doctest::Approx(0.5 + 0.25 + 0.125 + 3.0));

  // The per-step view tiles features by step and repeats the action block.
  const Eigen::MatrixXd seq = gs.ToSequence();
  CHECK(seq.rows() == 6);
  CHECK(seq.cols() == 42);
  CHECK(seq(2, 0 * 8 + agents::kFeatSi) == 0.5);
  CHECK(seq(5, 1 * 8 + agents::kFeatLoss) == 0.25);
  CHECK(seq(0, 2 * 8 + agents::kFeatRtt) == 0.125);
  for (int k = 0; k < 6; ++k) CHECK(seq(k, 24 + 3) == 1.0);
}

TEST_CASE("misaligned observations are rejected") {
  AgentObservation qua, res, fr;
  qua.timestamp_s = 0.6;
  res.timestamp_s = 0.5;
  fr.timestamp_s = 0.6;
  CHECK_THROWS_AS(agents::BuildGlobalState(qua, res, fr, 0, 0, 0),
                  ContractError);
}

TEST_CASE("all-zero inputs produce an all-zero feature block") {
  AgentObservation qua, res, fr;
  const agents::GlobalState gs =
      agents::BuildGlobalState(qua, res, fr, 3, 1, 0);
  for (int i = 0; i < 144; ++i) CHECK(gs.data[i] == 0.0);
}

TEST_CASE("agent cadences are fixed") {
  CHECK(agents::AgentIntervalS(AgentKind::kQua) == 0.1);
  CHECK(agents::AgentIntervalS(AgentKind::kFr) == 0.1);
  CHECK(agents::AgentIntervalS(AgentKind::kRes) == 1.0);
  CHECK(agents::ActionSpace::Size(AgentKind::kQua) == 7);
  CHECK(agents::ActionSpace::Size(AgentKind::kRes) == 4);
  CHECK(agents::ActionSpace::Size(AgentKind::kFr) == 7);
}
