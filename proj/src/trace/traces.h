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

#ifndef MABR_TRACE_TRACES_H_
#define MABR_TRACE_TRACES_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "common/config.h"

namespace mabr::trace {

struct BandwidthSample {
  double t_s;
  double kbps;
};

// Channel bandwidth over time. Zero-order hold between samples: the value at
// time t is the value of the latest sample with t_s <= t; the first sample
// back-fills earlier times and the last holds forever.
struct NetworkTrace {
  std::string id;
  std::vector<BandwidthSample> samples;  // timestamps strictly increasing
  std::optional<double> base_rtt_ms;
  std::optional<double> loss_rate;
  double granularity_s = 0.0;  // set by Resample, 0 for raw traces

  double BandwidthAt(double t_s) const;
  double EndTime() const { return samples.empty() ? 0.0 : samples.back().t_s; }
};

struct ContentSample {
  double t_s;
  double si;
  double ti;
};

// Per-interval content complexity (spatial / temporal information), zero-order
// hold like NetworkTrace.
struct ContentTrace {
  std::string id;
  std::vector<ContentSample> samples;

  // Time-weighted means over [t0, t1).
  void MeanOver(double t0, double t1, double* si, double* ti) const;
  double EndTime() const { return samples.empty() ? 0.0 : samples.back().t_s; }
};

struct TraceSplit {
  std::vector<std::string> train;
  std::vector<std::string> test;
  uint64_t seed = 0;
};

enum class ContentProfile { kLowMotion, kConferencing, kGaming, kSports };

const char* ContentProfileName(ContentProfile profile);
ContentProfile ParseContentProfile(const std::string& name);

// Families for synthetic bandwidth traces. "stepdown" is noise-free: a flat
// high phase followed by a flat low phase.
enum class NetworkFamily { kStable, kFluctuating, kVolatile, kStepdown };

const char* NetworkFamilyName(NetworkFamily family);
NetworkFamily ParseNetworkFamily(const std::string& name);

// Two-column CSV: seconds,kbps. Rejects empty files, malformed rows (error
// names the line) and non-increasing timestamps.
NetworkTrace LoadNetworkTrace(const std::string& path);

// Three-column CSV: seconds,si,ti.
ContentTrace LoadContentTrace(const std::string& path);

void WriteNetworkTrace(const NetworkTrace& trace, const std::string& path);
void WriteContentTrace(const ContentTrace& trace, const std::string& path);

// Rebins onto timestamps 0, g, 2g, ...; each output value is the
// time-weighted mean of the zero-order-hold input over [kg, (k+1)g).
NetworkTrace Resample(const NetworkTrace& trace, double granularity_s);

// Deterministic shuffle; train fraction 0.8 rounded, clamped so both sides
// are non-empty. Needs at least two ids.
TraceSplit SplitTraces(const std::vector<std::string>& ids, uint64_t seed);

// Mean-reverting SI/TI process around the profile constants from the config
// (traces.<profile>.*). Deterministic per (profile, seed).
ContentTrace SynthesizeContentTrace(ContentProfile profile, double duration_s,
                                    uint64_t seed, const Config& config);

// Synthetic bandwidth trace at 0.5 s granularity.
NetworkTrace SynthesizeNetworkTrace(NetworkFamily family, double duration_s,
                                    uint64_t seed);

// Flat high->low step, the congestion-event shape used in tests.
NetworkTrace MakeStepTrace(double high_kbps, double low_kbps, double step_at_s,
                           double duration_s, double granularity_s = 0.5);

// Manifest: one trace per line, `path [base_rtt_ms=X] [loss_rate=Y] [id=Z]`,
// `#` comments. Paths are resolved relative to the manifest's directory.
std::vector<NetworkTrace> LoadManifest(const std::string& path);

}  // namespace mabr::trace

#endif  // MABR_TRACE_TRACES_H_
