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

#ifndef MABR_CODEC_CODEC_H_
#define MABR_CODEC_CODEC_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "common/config.h"
#include "common/rng.h"

namespace mabr::codec {

// 16:9 output resolutions, ordered low to high.
enum class Resolution { k540p, k720p, k1080p, k1440p };

inline constexpr int kNumResolutions = 4;
inline constexpr int kMinRateFactor = 0;
inline constexpr int kMaxRateFactor = 51;
inline constexpr int kMaxFrameRate = 60;

int64_t PixelCount(Resolution resolution);
// Pixel count relative to 1440p, in (0, 1].
double PixelFraction(Resolution resolution);
const char* ResolutionName(Resolution resolution);
Resolution ParseResolution(const std::string& name);

// The controllable encoding factors.
struct EncoderConfig {
  int rate_factor = 23;                         // 0..51, lower = better
  Resolution resolution = Resolution::k1080p;
  int frame_rate = 30;                          // {60,50,40,30,20,10,0}
};

struct EncodedFrame {
  int64_t frame_id = 0;
  double capture_time_s = 0.0;
  int size_bytes = 0;
  double quality = 0.0;  // [0, 100] proxy score
  bool keyframe = false;
  EncoderConfig config;
};

// Constants of the parametric rate/quality model. The reference point is
// (rf_ref, 1440p, 60 fps), where the bitrate equals R_ref(si, ti); moving
// rf by 6 halves/doubles the bitrate, resolution and frame rate scale it by
// power laws. Quality decays polynomially in rate factor and resolution and
// saturates in frame rate; the SI-dependent exponents make high-complexity
// content pay more for downscaling, which shifts the optimal resolution
// switch point per content.
struct RateQualityParams {
  double b_s = 0.75;
  double b_t = 0.6;
  double k_t = 3.0;
  double c_q_min = 0.4;
  double c_q_max = 0.9;
  double d_s_min = 0.3;
  double d_s_max = 0.8;
  double si_norm = 100.0;
  double rref_min_kbps = 2000.0;
  double rref_max_kbps = 12000.0;
  double rref_si_ti_norm = 160.0;
  double noise_sigma = 0.15;
  int rf_ref = 23;
  double keyframe_cost = 4.0;

  static RateQualityParams FromConfig(const Config& config);

  double ReferenceKbps(double si, double ti) const;
  double QualityRfExponent(double si) const;    // c_q(si)
  double QualityResExponent(double si) const;   // d_s(si)
};

// Model bitrate in kbps for a configuration on given content. frame_rate 0
// yields 0 (no frames).
double ModelBitrateKbps(const EncoderConfig& config, double si, double ti,
                        const RateQualityParams& params);

// Quality proxy score in [0, 100]; 0 when frame_rate is 0.
double ModelQuality(const EncoderConfig& config, double si, double ti,
                    const RateQualityParams& params);

// Rate factor (real-valued, unclamped) at which the model bitrate equals
// target_kbps for the given resolution/frame rate/content; the VBR path.
double InvertRateFactor(double target_kbps, Resolution resolution,
                        int frame_rate, double si, double ti,
                        const RateQualityParams& params);

// Decides, per frame slot, whether the sender emits the frame. Used by the
// baseline's leaky-bucket frame skipping; null means emit everything.
class FrameGate {
 public:
  virtual ~FrameGate() = default;
  virtual bool ShouldEncode(double frame_time_s, double frame_interval_s) = 0;
  virtual void OnEncoded(int frame_bytes) = 0;
};

// Stateful frame producer. Tracks resolution switches (which restart the
// encoder and cost a keyframe) and applies the per-frame log-normal size
// noise from a seeded stream.
class Encoder {
 public:
  Encoder(const RateQualityParams& params, uint64_t seed);

  // Emits floor(frame_rate * interval) frame slots with capture times spread
  // uniformly over [interval_start, interval_start + interval). The mean
  // frame size before noise is bitrate * interval / frame count.
  std::vector<EncodedFrame> EncodeInterval(const EncoderConfig& config,
                                           double si, double ti,
                                           double interval_start_s,
                                           double interval_s,
                                           FrameGate* gate = nullptr);

  int64_t frames_emitted() const { return next_frame_id_; }

 private:
  RateQualityParams params_;
  Rng rng_;
  std::optional<Resolution> last_resolution_;
  int64_t next_frame_id_ = 0;
};

}  // namespace mabr::codec

#endif  // MABR_CODEC_CODEC_H_
