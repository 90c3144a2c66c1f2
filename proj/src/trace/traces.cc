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

#include "trace/traces.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "common/error.h"
#include "common/rng.h"

namespace mabr::trace {
namespace {

bool ParseDouble(const std::string& s, double* out) {
  char* end = nullptr;
  *out = std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0';
}

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> SplitOn(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(Trim(item));
  return parts;
}

// Shared CSV row reader; calls `row` with (line_no, fields) for every
// non-empty, non-comment line.
template <typename Fn>
void ForEachCsvRow(const std::string& path, Fn row) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trace file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    row(line_no, SplitOn(trimmed, ','));
  }
}

// Integral of the zero-order-hold step function defined by (ts, vs) over
// [t0, t1). The first value back-fills, the last holds forever.
double ZohIntegral(const std::vector<double>& ts, const std::vector<double>& vs,
                   double t0, double t1) {
  double acc = 0.0;
  for (size_t i = 0; i < ts.size(); ++i) {
    const double seg_start = (i == 0) ? -std::numeric_limits<double>::infinity()
                                      : ts[i];
    const double seg_end = (i + 1 < ts.size())
                               ? ts[i + 1]
                               : std::numeric_limits<double>::infinity();
    const double lo = std::max(seg_start, t0);
    const double hi = std::min(seg_end, t1);
    if (hi > lo) acc += vs[i] * (hi - lo);
  }
  return acc;
}

double ProfileKey(const Config& config, ContentProfile profile,
                  const char* suffix) {
  return config.GetDouble(std::string("traces.") + ContentProfileName(profile) +
                          "." + suffix);
}

}  // namespace

double NetworkTrace::BandwidthAt(double t_s) const {
  if (samples.empty()) throw ContractError("BandwidthAt on empty trace");
  // Latest sample at or before t_s; back-fill before the first.
  auto it = std::upper_bound(
      samples.begin(), samples.end(), t_s,
      [](double t, const BandwidthSample& s) { return t < s.t_s; });
  if (it == samples.begin()) return samples.front().kbps;
  return std::prev(it)->kbps;
}

void ContentTrace::MeanOver(double t0, double t1, double* si, double* ti) const {
  if (samples.empty()) throw ContractError("MeanOver on empty content trace");
  if (t1 <= t0) throw ContractError("MeanOver: empty window");
  std::vector<double> ts, sis, tis;
  ts.reserve(samples.size());
  sis.reserve(samples.size());
  tis.reserve(samples.size());
  for (const auto& s : samples) {
    ts.push_back(s.t_s);
    sis.push_back(s.si);
    tis.push_back(s.ti);
  }
  *si = ZohIntegral(ts, sis, t0, t1) / (t1 - t0);
  *ti = ZohIntegral(ts, tis, t0, t1) / (t1 - t0);
}

const char* ContentProfileName(ContentProfile profile) {
  switch (profile) {
    case ContentProfile::kLowMotion: return "low_motion";
    case ContentProfile::kConferencing: return "conferencing";
    case ContentProfile::kGaming: return "gaming";
    case ContentProfile::kSports: return "sports";
  }
  return "?";
}

ContentProfile ParseContentProfile(const std::string& name) {
  if (name == "low_motion") return ContentProfile::kLowMotion;
  if (name == "conferencing") return ContentProfile::kConferencing;
  if (name == "gaming") return ContentProfile::kGaming;
  if (name == "sports") return ContentProfile::kSports;
  throw ConfigError("unknown content profile: " + name);
}

const char* NetworkFamilyName(NetworkFamily family) {
  switch (family) {
    case NetworkFamily::kStable: return "stable";
    case NetworkFamily::kFluctuating: return "fluctuating";
    case NetworkFamily::kVolatile: return "volatile";
    case NetworkFamily::kStepdown: return "stepdown";
  }
  return "?";
}

NetworkFamily ParseNetworkFamily(const std::string& name) {
  if (name == "stable") return NetworkFamily::kStable;
  if (name == "fluctuating") return NetworkFamily::kFluctuating;
  if (name == "volatile") return NetworkFamily::kVolatile;
  if (name == "stepdown") return NetworkFamily::kStepdown;
  throw ConfigError("unknown network family: " + name);
}

NetworkTrace LoadNetworkTrace(const std::string& path) {
  NetworkTrace trace;
  trace.id = std::filesystem::path(path).stem().string();
  ForEachCsvRow(path, [&](int line_no, const std::vector<std::string>& fields) {
    double t = 0.0, kbps = 0.0;
    if (fields.size() != 2 || !ParseDouble(fields[0], &t) ||
        !ParseDouble(fields[1], &kbps)) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected `seconds,kbps`");
    }
    if (kbps < 0.0) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": negative bandwidth");
    }
    if (!trace.samples.empty() && t <= trace.samples.back().t_s) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": non-increasing timestamp");
    }
    trace.samples.push_back({t, kbps});
  });
  if (trace.samples.empty()) throw ParseError("empty trace: " + path);
  return trace;
}

ContentTrace LoadContentTrace(const std::string& path) {
  ContentTrace trace;
  trace.id = std::filesystem::path(path).stem().string();
  ForEachCsvRow(path, [&](int line_no, const std::vector<std::string>& fields) {
    double t = 0.0, si = 0.0, ti = 0.0;
    if (fields.size() != 3 || !ParseDouble(fields[0], &t) ||
        !ParseDouble(fields[1], &si) || !ParseDouble(fields[2], &ti)) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected `seconds,si,ti`");
    }
    if (si < 0.0 || ti < 0.0) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": negative si/ti");
    }
    if (!trace.samples.empty() && t <= trace.samples.back().t_s) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": non-increasing timestamp");
    }
    trace.samples.push_back({t, si, ti});
  });
  if (trace.samples.empty()) throw ParseError("empty trace: " + path);
  return trace;
}

void WriteNetworkTrace(const NetworkTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write trace file: " + path);
  char buf[64];
  for (const auto& s : trace.samples) {
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g\n", s.t_s, s.kbps);
    out << buf;
  }
}

void WriteContentTrace(const ContentTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write trace file: " + path);
  char buf[96];
  for (const auto& s : trace.samples) {
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.6g\n", s.t_s, s.si, s.ti);
    out << buf;
  }
}

NetworkTrace Resample(const NetworkTrace& trace, double granularity_s) {
  if (granularity_s <= 0.0) throw ContractError("Resample: granularity <= 0");
  if (trace.samples.empty()) throw ContractError("Resample: empty trace");

  std::vector<double> ts, vs;
  for (const auto& s : trace.samples) {
    ts.push_back(s.t_s);
    vs.push_back(s.kbps);
  }
  const double end = trace.samples.back().t_s;
  const auto bins = static_cast<size_t>(
      std::floor(end / granularity_s + 1e-9)) + 1;

  NetworkTrace out;
  out.id = trace.id;
  out.base_rtt_ms = trace.base_rtt_ms;
  out.loss_rate = trace.loss_rate;
  out.granularity_s = granularity_s;
  out.samples.reserve(bins);
  for (size_t k = 0; k < bins; ++k) {
    const double t0 = static_cast<double>(k) * granularity_s;
    const double t1 = t0 + granularity_s;
    out.samples.push_back({t0, ZohIntegral(ts, vs, t0, t1) / granularity_s});
  }
  return out;
}

TraceSplit SplitTraces(const std::vector<std::string>& ids, uint64_t seed) {
  if (ids.size() < 2) throw ContractError("SplitTraces: need at least 2 ids");
  std::vector<std::string> shuffled = ids;
  Rng rng(DeriveSeed(seed, "trace-split"));
  // Fisher-Yates; std::shuffle is implementation-defined, this is not.
  for (size_t i = shuffled.size() - 1; i > 0; --i) {
    const size_t j = rng.UniformInt(i + 1);
    std::swap(shuffled[i], shuffled[j]);
  }
  const auto n = shuffled.size();
  auto n_train = static_cast<size_t>(std::llround(0.8 * static_cast<double>(n)));
  n_train = std::clamp<size_t>(n_train, 1, n - 1);

  TraceSplit split;
  split.seed = seed;
  split.train.assign(shuffled.begin(), shuffled.begin() + n_train);
  split.test.assign(shuffled.begin() + n_train, shuffled.end());
  return split;
}

ContentTrace SynthesizeContentTrace(ContentProfile profile, double duration_s,
                                    uint64_t seed, const Config& config) {
  if (duration_s <= 0.0) throw ContractError("SynthesizeContentTrace: duration <= 0");
  const double dt = config.GetDouble("traces.content_dt_s");
  const double si_mean = ProfileKey(config, profile, "si_mean");
  const double si_spread = ProfileKey(config, profile, "si_spread");
  const double ti_mean = ProfileKey(config, profile, "ti_mean");
  const double ti_spread = ProfileKey(config, profile, "ti_spread");

  Rng rng(DeriveSeed(seed, "content", static_cast<uint64_t>(profile)));
  const auto n = static_cast<size_t>(std::floor(duration_s / dt + 1e-9));
  // Mean reversion per step; values stay inside mean +/- spread.
  constexpr double kReversion = 0.05;
  constexpr double kNoise = 0.25;

  ContentTrace trace;
  trace.id = std::string(ContentProfileName(profile)) + "_" + std::to_string(seed);
  trace.samples.reserve(n);
  double si = si_mean;
  double ti = ti_mean;
  for (size_t k = 0; k < n; ++k) {
    trace.samples.push_back({static_cast<double>(k) * dt, si, ti});
    si += kReversion * (si_mean - si) + kNoise * si_spread * std::sqrt(dt) * rng.Normal();
    ti += kReversion * (ti_mean - ti) + kNoise * ti_spread * std::sqrt(dt) * rng.Normal();
    si = std::clamp(si, std::max(0.0, si_mean - si_spread), si_mean + si_spread);
    ti = std::clamp(ti, std::max(0.0, ti_mean - ti_spread), ti_mean + ti_spread);
  }
  return trace;
}

NetworkTrace SynthesizeNetworkTrace(NetworkFamily family, double duration_s,
                                    uint64_t seed) {
  if (duration_s <= 0.0) throw ContractError("SynthesizeNetworkTrace: duration <= 0");
  constexpr double kGranularity = 0.5;

  if (family == NetworkFamily::kStepdown) {
    return MakeStepTrace(8000.0, 2000.0, duration_s / 2.0, duration_s,
                         kGranularity);
  }

  struct FamilyParams {
    double base_kbps;
    double wander;      // relative AR(1) noise per step
    double reversion;
    double floor_kbps;
    double ceil_kbps;
    double regime_prob;  // chance per step of jumping to a new level
  };
  FamilyParams p{};
  switch (family) {
    case NetworkFamily::kStable:
      p = {8000.0, 0.02, 0.1, 6000.0, 10000.0, 0.0};
      break;
    case NetworkFamily::kFluctuating:
      p = {6000.0, 0.08, 0.05, 2500.0, 10000.0, 0.01};
      break;
    case NetworkFamily::kVolatile:
      p = {5000.0, 0.15, 0.03, 1500.0, 11000.0, 0.04};
      break;
    case NetworkFamily::kStepdown:
      break;  // handled above
  }

  Rng rng(DeriveSeed(seed, "network", static_cast<uint64_t>(family)));
  NetworkTrace trace;
  trace.id = std::string(NetworkFamilyName(family)) + "_" + std::to_string(seed);
  trace.granularity_s = kGranularity;
  const auto n = static_cast<size_t>(std::floor(duration_s / kGranularity + 1e-9));
  double level = p.base_kbps * rng.Uniform(0.8, 1.2);
  double kbps = level;
  for (size_t k = 0; k < n; ++k) {
    trace.samples.push_back({static_cast<double>(k) * kGranularity,
                             std::clamp(kbps, p.floor_kbps, p.ceil_kbps)});
    if (p.regime_prob > 0.0 && rng.Bernoulli(p.regime_prob)) {
      level = rng.Uniform(p.floor_kbps, p.ceil_kbps);
    }
    kbps += p.reversion * (level - kbps) + p.wander * level * rng.Normal();
    kbps = std::clamp(kbps, p.floor_kbps, p.ceil_kbps);
  }
  return trace;
}

NetworkTrace MakeStepTrace(double high_kbps, double low_kbps, double step_at_s,
                           double duration_s, double granularity_s) {
  NetworkTrace trace;
  trace.id = "stepdown";
  trace.granularity_s = granularity_s;
  const auto n = static_cast<size_t>(std::floor(duration_s / granularity_s + 1e-9));
  for (size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * granularity_s;
    trace.samples.push_back({t, t < step_at_s ? high_kbps : low_kbps});
  }
  return trace;
}

std::vector<NetworkTrace> LoadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open manifest: " + path);
  const auto dir = std::filesystem::path(path).parent_path();

  std::vector<NetworkTrace> traces;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;

    std::stringstream ss(line);
    std::string token;
    ss >> token;
    std::filesystem::path trace_path(token);
    if (trace_path.is_relative()) trace_path = dir / trace_path;
    NetworkTrace trace = LoadNetworkTrace(trace_path.string());

    while (ss >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) {
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": expected key=value, got " + token);
      }
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      double num = 0.0;
      if (key == "base_rtt_ms") {
        if (!ParseDouble(value, &num)) {
          throw ParseError(path + ":" + std::to_string(line_no) +
                           ": bad base_rtt_ms");
        }
        trace.base_rtt_ms = num;
      } else if (key == "loss_rate") {
        if (!ParseDouble(value, &num) || num < 0.0 || num > 1.0) {
          throw ParseError(path + ":" + std::to_string(line_no) +
                           ": bad loss_rate");
        }
        trace.loss_rate = num;
      } else if (key == "id") {
        trace.id = value;
      } else {
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": unknown manifest key " + key);
      }
    }
    traces.push_back(std::move(trace));
  }
  if (traces.empty()) throw ParseError("empty manifest: " + path);
  return traces;
}

}  // namespace mabr::trace
