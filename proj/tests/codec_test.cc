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

#include <cmath>
#include <vector>

#include "codec/codec.h"
#include "common/rng.h"

using namespace mabr;
using codec::EncoderConfig;
using codec::RateQualityParams;
using codec::Resolution;

namespace {

EncoderConfig Cfg(int rf, Resolution res, int fps) {
  EncoderConfig c;
  c.rate_factor = rf;
  c.resolution = res;
  c.frame_rate = fps;
  return c;
}

// Finds the bitrate at which the 1080p and 720p quality-vs-bitrate curves
// cross, by sweeping the rate factor and interpolating on a bitrate grid.
double CrossoverKbps(double si, double ti, const RateQualityParams& params) {
  constexpr int kPoints = 1024;
  std::vector<double> rate_hi(kPoints), q_hi(kPoints);
  std::vector<double> rate_lo(kPoints), q_lo(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    // Ascending bitrate = descending rate factor.
    const int rf = static_cast<int>(std::lround(
        51.0 - 51.0 * static_cast<double>(i) / (kPoints - 1)));
    rate_hi[i] = ModelBitrateKbps(Cfg(rf, Resolution::k1080p, 60), si, ti, params);
    q_hi[i] = ModelQuality(Cfg(rf, Resolution::k1080p, 60), si, ti, params);
    rate_lo[i] = ModelBitrateKbps(Cfg(rf, Resolution::k720p, 60), si, ti, params);
    q_lo[i] = ModelQuality(Cfg(rf, Resolution::k720p, 60), si, ti, params);
  }
  const auto interp = [](const std::vector<double>& xs,
                         const std::vector<double>& ys, double x) {
    for (size_t i = 1; i < xs.size(); ++i) {
      if (x <= xs[i]) {
        const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return ys[i - 1] + w * (ys[i] - ys[i - 1]);
      }
    }
    return ys.back();
  };
  const double lo = std::max(rate_hi.front(), rate_lo.front());
  const double hi = std::min(rate_hi.back(), rate_lo.back());
  double crossing = -1.0;
  double prev_diff = 0.0;
  for (int i = 0; i < 4000; ++i) {
    const double r = lo + (hi - lo) * i / 3999.0;
    const double diff = interp(rate_hi, q_hi, r) - interp(rate_lo, q_lo, r);
    if (i > 0 && diff * prev_diff < 0.0) {
      crossing = r;
      break;
    }
    prev_diff = diff;
  }
  return crossing;
}

}  // namespace

TEST_CASE("bitrate at the reference point equals the reference rate") {
  RateQualityParams params;
  for (double si : {20.0, 60.0, 90.0}) {
    for (double ti : {5.0, 45.0}) {
      const double kbps =
          ModelBitrateKbps(Cfg(23, Resolution::k1440p, 60), si, ti, params);
      CHECK(kbps == doctest::Approx(params.ReferenceKbps(si, ti)).epsilon(1e-12));
    }
  }
}

TEST_CASE("six rate-factor points halve the bitrate") {
  RateQualityParams params;
  const double a = ModelBitrateKbps(Cfg(17, Resolution::k1080p, 60), 60, 12, params);
  const double b = ModelBitrateKbps(Cfg(23, Resolution::k1080p, 60), 60, 12, params);
  CHECK(a == doctest::Approx(2.0 * b).epsilon(1e-12));
  const double c = ModelBitrateKbps(Cfg(29, Resolution::k1080p, 60), 60, 12, params);
  CHECK(c == doctest::Approx(0.5 * b).epsilon(1e-12));
}

TEST_CASE("zero frame rate encodes nothing") {
  RateQualityParams params;
  CHECK(ModelBitrateKbps(Cfg(23, Resolution::k1080p, 0), 60, 12, params) == 0.0);
  CHECK(ModelQuality(Cfg(23, Resolution::k1080p, 0), 60, 12, params) == 0.0);
  codec::Encoder encoder(params, 1);
  CHECK(encoder.EncodeInterval(Cfg(23, Resolution::k1080p, 0), 60, 12, 0.0, 0.1)
            .empty());
}

TEST_CASE("quality peaks at the best configuration") {
  RateQualityParams params;
  const double q = ModelQuality(Cfg(0, Resolution::k1440p, 60), 50, 20, params);
  CHECK(q == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("bitrate and quality are monotone in the controls") {
  RateQualityParams params;
  Rng rng(5);
  const Resolution resolutions[] = {Resolution::k540p, Resolution::k720p,
                                    Resolution::k1080p, Resolution::k1440p};
  for (int round = 0; round < 50; ++round) {
    const double si = 100.0 * rng.Uniform();
    const double ti = 100.0 * rng.Uniform();
    const int rf = static_cast<int>(rng.UniformInt(51));
    const int res_index = static_cast<int>(rng.UniformInt(3));
    const int fps_steps[] = {10, 20, 30, 40, 50, 60};
    const int fps = fps_steps[rng.UniformInt(5)];

    const auto base = Cfg(rf, resolutions[res_index], fps);
    CHECK(ModelBitrateKbps(Cfg(rf + 1, base.resolution, fps), si, ti, params) <
          ModelBitrateKbps(base, si, ti, params));
    CHECK(ModelQuality(Cfg(rf + 1, base.resolution, fps), si, ti, params) <
          ModelQuality(base, si, ti, params));
    CHECK(ModelBitrateKbps(Cfg(rf, resolutions[res_index + 1], fps), si, ti,
                           params) > ModelBitrateKbps(base, si, ti, params));
    CHECK(ModelQuality(Cfg(rf, resolutions[res_index + 1], fps), si, ti,
                       params) > ModelQuality(base, si, ti, params));
    CHECK(ModelBitrateKbps(Cfg(rf, base.resolution, fps + 10), si, ti, params) >
          ModelBitrateKbps(base, si, ti, params));
    CHECK(ModelQuality(Cfg(rf, base.resolution, fps + 10), si, ti, params) >
          ModelQuality(base, si, ti, params));
  }
}

TEST_CASE("resolution switch points depend on content") {
  RateQualityParams params;
  // Conferencing vs gaming profile means.
  const double conferencing = CrossoverKbps(60.0, 12.0, params);
  const double gaming = CrossoverKbps(90.0, 45.0, params);
  REQUIRE(conferencing > 0.0);
  REQUIRE(gaming > 0.0);
  const double rel =
      std::abs(conferencing - gaming) / std::min(conferencing, gaming);
  CHECK(rel >= 0.20);
}

TEST_CASE("interval frame count is rate times length") {
  RateQualityParams params;
  params.noise_sigma = 0.0;
  codec::Encoder encoder(params, 1);
  const auto frames =
      encoder.EncodeInterval(Cfg(23, Resolution::k1080p, 30), 60, 12, 0.0, 0.1);
  CHECK(frames.size() == 3);
}

TEST_CASE("zero-noise frames all carry the mean size") {
  RateQualityParams params;
  params.noise_sigma = 0.0;
  codec::Encoder encoder(params, 1);
  const auto cfg = Cfg(23, Resolution::k1080p, 30);
  // Skip the keyframe interval, then check a steady one.
  encoder.EncodeInterval(cfg, 60, 12, 0.0, 0.1);
  const auto frames = encoder.EncodeInterval(cfg, 60, 12, 0.1, 0.1);
  REQUIRE(frames.size() == 3);
  const double kbps = ModelBitrateKbps(cfg, 60, 12, params);
  const auto mean = std::llround(kbps * 1000.0 * 0.1 / 8.0 / 3.0);
  for (const auto& f : frames) {
    CHECK(f.size_bytes == mean);
    CHECK_FALSE(f.keyframe);
  }
}

TEST_CASE("encoding is deterministic per seed") {
  RateQualityParams params;
  const auto run = [&params]() {
    codec::Encoder encoder(params, 77);
    std::vector<int> sizes;
    for (int i = 0; i < 10; ++i) {
      for (const auto& f : encoder.EncodeInterval(
               Cfg(23, Resolution::k1080p, 30), 60, 12, i * 0.1, 0.1)) {
        sizes.push_back(f.size_bytes);
      }
    }
    return sizes;
  };
  CHECK(run() == run());
}

TEST_CASE("a resolution switch restarts with a costly keyframe") {
  RateQualityParams params;
  params.noise_sigma = 0.0;
  codec::Encoder encoder(params, 1);
  encoder.EncodeInterval(Cfg(23, Resolution::k1080p, 30), 60, 12, 0.0, 0.1);
  const auto frames =
      encoder.EncodeInterval(Cfg(23, Resolution::k720p, 30), 60, 12, 0.1, 0.1);
  REQUIRE(frames.size() == 3);
  CHECK(frames[0].keyframe);
  CHECK_FALSE(frames[1].keyframe);
  CHECK(frames[0].size_bytes ==
        doctest::Approx(params.keyframe_cost * frames[1].size_bytes).epsilon(0.01));
  // Same resolution again: no restart.
  const auto steady =
      encoder.EncodeInterval(Cfg(23, Resolution::k720p, 30), 60, 12, 0.2, 0.1);
  CHECK_FALSE(steady[0].keyframe);
}

TEST_CASE("rate-factor inversion matches the forward model") {
  RateQualityParams params;
  Rng rng(3);
  for (int round = 0; round < 50; ++round) {
    const double si = 100.0 * rng.Uniform();
    const double ti = 100.0 * rng.Uniform();
    const int rf = static_cast<int>(rng.UniformInt(52));
    const auto cfg = Cfg(rf, Resolution::k1080p, 30);
    const double kbps = ModelBitrateKbps(cfg, si, ti, params);
    const double rf_back = codec::InvertRateFactor(kbps, Resolution::k1080p, 30,
                                                   si, ti, params);
    CHECK(rf_back == doctest::Approx(static_cast<double>(rf)).epsilon(1e-9));
  }
}

TEST_CASE("mean-one size noise tracks the model on average") {
  RateQualityParams params;  // sigma 0.15
  codec::Encoder encoder(params, 9);
  const auto cfg = Cfg(23, Resolution::k1080p, 30);
  const double kbps = ModelBitrateKbps(cfg, 60, 12, params);
  double total_bytes = 0.0;
  const int intervals = 2000;
  for (int i = 0; i < intervals; ++i) {
    for (const auto& f :
         encoder.EncodeInterval(cfg, 60, 12, i * 0.1, 0.1)) {
      if (!f.keyframe) total_bytes += f.size_bytes;
    }
  }
  const double mean_kbps = total_bytes * 8.0 / 1000.0 / (intervals * 0.1);
  CHECK(mean_kbps == doctest::Approx(kbps).epsilon(0.02));
}
