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

#include "codec/codec.h"

#include <algorithm>
#include <cmath>

#include "common/error.h"

namespace mabr::codec {
namespace {

double Clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

int64_t PixelCount(Resolution resolution) {
  switch (resolution) {
    case Resolution::k540p: return 960LL * 540;
    case Resolution::k720p: return 1280LL * 720;
    case Resolution::k1080p: return 1920LL * 1080;
    case Resolution::k1440p: return 2560LL * 1440;
  }
  return 0;
}

double PixelFraction(Resolution resolution) {
  return static_cast<double>(PixelCount(resolution)) /
         static_cast<double>(PixelCount(Resolution::k1440p));
}

const char* ResolutionName(Resolution resolution) {
  switch (resolution) {
    case Resolution::k540p: return "540p";
    case Resolution::k720p: return "720p";
    case Resolution::k1080p: return "1080p";
    case Resolution::k1440p: return "1440p";
  }
  return "?";
}

Resolution ParseResolution(const std::string& name) {
  if (name == "540p") return Resolution::k540p;
  if (name == "720p") return Resolution::k720p;
  if (name == "1080p") return Resolution::k1080p;
  if (name == "1440p") return Resolution::k1440p;
  throw ConfigError("unknown resolution: " + name);
}

RateQualityParams RateQualityParams::FromConfig(const Config& config) {
  RateQualityParams p;
  p.b_s = config.GetDouble("codec.b_s");
  p.b_t = config.GetDouble("codec.b_t");
  p.k_t = config.GetDouble("codec.k_t");
  p.c_q_min = config.GetDouble("codec.c_q_min");
  p.c_q_max = config.GetDouble("codec.c_q_max");
  p.d_s_min = config.GetDouble("codec.d_s_min");
  p.d_s_max = config.GetDouble("codec.d_s_max");
  p.si_norm = config.GetDouble("codec.si_norm");
  p.rref_min_kbps = config.GetDouble("codec.rref_min_kbps");
  p.rref_max_kbps = config.GetDouble("codec.rref_max_kbps");
  p.rref_si_ti_norm = config.GetDouble("codec.rref_si_ti_norm");
  p.noise_sigma = config.GetDouble("codec.noise_sigma");
  p.rf_ref = config.GetInt("codec.rf_ref");
  p.keyframe_cost = config.GetDouble("codec.keyframe_cost");
  return p;
}

double RateQualityParams::ReferenceKbps(double si, double ti) const {
  return rref_min_kbps +
         (rref_max_kbps - rref_min_kbps) * Clamp01((si + ti) / rref_si_ti_norm);
}

double RateQualityParams::QualityRfExponent(double si) const {
  return c_q_min + (c_q_max - c_q_min) * Clamp01(si / si_norm);
}

double RateQualityParams::QualityResExponent(double si) const {
  return d_s_min + (d_s_max - d_s_min) * Clamp01(si / si_norm);
}

double ModelBitrateKbps(const EncoderConfig& config, double si, double ti,
                        const RateQualityParams& params) {
  if (config.frame_rate <= 0) return 0.0;
  const double s_term = std::pow(PixelFraction(config.resolution), params.b_s);
  const double t_term =
      std::pow(config.frame_rate / static_cast<double>(kMaxFrameRate), params.b_t);
  const double rf_term =
      std::exp2((params.rf_ref - config.rate_factor) / 6.0);
  return params.ReferenceKbps(si, ti) * s_term * t_term * rf_term;
}

double ModelQuality(const EncoderConfig& config, double si, double ti,
                    const RateQualityParams& params) {
  (void)ti;  // quality exponents depend on spatial complexity only
  if (config.frame_rate <= 0) return 0.0;
  const double rf_term = std::pow(
      (kMaxRateFactor - config.rate_factor) / static_cast<double>(kMaxRateFactor),
      params.QualityRfExponent(si));
  const double s_term =
      std::pow(PixelFraction(config.resolution), params.QualityResExponent(si));
  const double t = config.frame_rate / static_cast<double>(kMaxFrameRate);
  const double t_term =
      (1.0 - std::exp(-params.k_t * t)) / (1.0 - std::exp(-params.k_t));
  return 100.0 * rf_term * s_term * t_term;
}

double InvertRateFactor(double target_kbps, Resolution resolution,
                        int frame_rate, double si, double ti,
                        const RateQualityParams& params) {
  if (frame_rate <= 0) throw ContractError("InvertRateFactor: frame_rate <= 0");
  if (target_kbps <= 0.0) throw ContractError("InvertRateFactor: target <= 0");
  EncoderConfig at_ref;
  at_ref.rate_factor = params.rf_ref;
  at_ref.resolution = resolution;
  at_ref.frame_rate = frame_rate;
  const double base = ModelBitrateKbps(at_ref, si, ti, params);
  return params.rf_ref - 6.0 * std::log2(target_kbps / base);
}

Encoder::Encoder(const RateQualityParams& params, uint64_t seed)
    : params_(params), rng_(DeriveSeed(seed, "codec-noise")) {}

std::vector<EncodedFrame> Encoder::EncodeInterval(const EncoderConfig& config,
                                                  double si, double ti,
                                                  double interval_start_s,
                                                  double interval_s,
                                                  FrameGate* gate) {
  if (interval_s <= 0.0) throw ContractError("EncodeInterval: interval <= 0");
  std::vector<EncodedFrame> frames;
  if (config.frame_rate <= 0) return frames;

  const bool restart =
      !last_resolution_.has_value() || *last_resolution_ != config.resolution;
  last_resolution_ = config.resolution;

  const auto count = static_cast<int>(
      std::floor(config.frame_rate * interval_s + 1e-9));
  if (count <= 0) return frames;

  const double kbps = ModelBitrateKbps(config, si, ti, params_);
  const double mean_bytes = kbps * 1000.0 * interval_s / 8.0 / count;
  const double quality = ModelQuality(config, si, ti, params_);
  const double frame_dt = 1.0 / config.frame_rate;
  const double sigma = params_.noise_sigma;

  frames.reserve(count);
  bool keyframe_pending = restart;
  for (int i = 0; i < count; ++i) {
    const double capture = interval_start_s + i * frame_dt;
    if (gate != nullptr && !gate->ShouldEncode(capture, frame_dt)) {
      continue;  // sender-side skip: no id, no bytes
    }
    double bytes = mean_bytes;
    if (keyframe_pending) bytes *= params_.keyframe_cost;
    if (sigma > 0.0) {
      // Mean-one log-normal factor, so long-run actual tracks the model.
      bytes *= std::exp(sigma * rng_.Normal() - 0.5 * sigma * sigma);
    }
    EncodedFrame frame;
    frame.frame_id = next_frame_id_++;
    frame.capture_time_s = capture;
    frame.size_bytes = std::max<int64_t>(1, std::llround(bytes));
    frame.quality = quality;
    frame.keyframe = keyframe_pending;
    frame.config = config;
    keyframe_pending = false;
    if (gate != nullptr) gate->OnEncoded(frame.size_bytes);
    frames.push_back(frame);
  }
  return frames;
}

}  // namespace mabr::codec
