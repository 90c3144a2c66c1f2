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

#ifndef MABR_EVAL_QOE_H_
#define MABR_EVAL_QOE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mabr::eval {

// Per 0.1 s interval QoE tuple.
struct QoERecord {
  int interval_index = 0;
  double video_kbps = 0.0;
  double quality = 0.0;        // codec proxy score, not VMAF
  double playback_fps = 0.0;
  double frame_delay_s = 0.0;
  double rtt_s = 0.0;
  double loss_rate = 0.0;
};

struct QoEMeans {
  double video_kbps = 0.0;
  double quality = 0.0;
  double playback_fps = 0.0;
  double frame_delay_s = 0.0;
  double rtt_s = 0.0;
  double loss_rate = 0.0;
};

struct EpisodeReport {
  std::string controller;
  std::string trace_id;
  std::string content_id;
  uint64_t seed = 0;
  std::vector<QoERecord> records;
  QoEMeans means;
  // Baseline bookkeeping for the mode-exclusion checks.
  int64_t frames_skipped = 0;
  int64_t resolution_changes = 0;
  double mean_target_kbps = 0.0;        // 0 for controllers without a target
  double mean_abs_target_gap_kbps = 0.0;
};

// Arithmetic means over the records.
QoEMeans ComputeMeans(const std::vector<QoERecord>& records);

// Empirical CDF: values sorted ascending, fraction[i] = (i+1)/N.
struct Cdf {
  std::vector<double> values;
  std::vector<double> fractions;
};

Cdf MakeCdf(std::vector<double> values);

// The four reported metrics.
enum class Metric { kVideoKbps, kQuality, kPlaybackFps, kRttS };
const char* MetricName(Metric metric);
double MetricOf(const QoERecord& record, Metric metric);

struct ControllerSummary {
  std::string controller;
  int episodes = 0;
  QoEMeans means;  // mean of episode means, each episode weighted equally
  std::map<Metric, Cdf> cdfs;  // pooled per-interval values
};

std::vector<ControllerSummary> Aggregate(const std::vector<EpisodeReport>& reports);

}  // namespace mabr::eval

#endif  // MABR_EVAL_QOE_H_
