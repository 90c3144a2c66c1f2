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

#include "eval/qoe.h"

#include <algorithm>

#include "common/error.h"

namespace mabr::eval {

QoEMeans ComputeMeans(const std::vector<QoERecord>& records) {
  QoEMeans means;
  if (records.empty()) return means;
  for (const QoERecord& r : records) {
    means.video_kbps += r.video_kbps;
    means.quality += r.quality;
    means.playback_fps += r.playback_fps;
    means.frame_delay_s += r.frame_delay_s;
    means.rtt_s += r.rtt_s;
    means.loss_rate += r.loss_rate;
  }
  const double inv = 1.0 / static_cast<double>(records.size());
  means.video_kbps *= inv;
  means.quality *= inv;
  means.playback_fps *= inv;
  means.frame_delay_s *= inv;
  means.rtt_s *= inv;
  means.loss_rate *= inv;
  return means;
}

Cdf MakeCdf(std::vector<double> values) {
  Cdf cdf;
  if (values.empty()) return cdf;
  std::sort(values.begin(), values.end());
  cdf.values = std::move(values);
  cdf.fractions.resize(cdf.values.size());
  const double n = static_cast<double>(cdf.values.size());
  for (size_t i = 0; i < cdf.values.size(); ++i) {
    cdf.fractions[i] = static_cast<double>(i + 1) / n;
  }
  return cdf;
}

const char* MetricName(Metric metric) {
  switch (metric) {
    case Metric::kVideoKbps: return "video_kbps";
    case Metric::kQuality: return "quality";
    case Metric::kPlaybackFps: return "playback_fps";
    case Metric::kRttS: return "rtt_s";
  }
  return "?";
}

double MetricOf(const QoERecord& record, Metric metric) {
  switch (metric) {
    case Metric::kVideoKbps: return record.video_kbps;
    case Metric::kQuality: return record.quality;
    case Metric::kPlaybackFps: return record.playback_fps;
    case Metric::kRttS: return record.rtt_s;
  }
  return 0.0;
}

std::vector<ControllerSummary> Aggregate(
    const std::vector<EpisodeReport>& reports) {
  if (reports.empty()) throw ContractError("Aggregate: no reports");
  constexpr Metric kMetrics[] = {Metric::kVideoKbps, Metric::kQuality,
                                 Metric::kPlaybackFps, Metric::kRttS};

  std::vector<std::string> order;  // first-seen controller order
  std::map<std::string, std::vector<const EpisodeReport*>> by_controller;
  for (const EpisodeReport& r : reports) {
    auto& bucket = by_controller[r.controller];
    if (bucket.empty()) order.push_back(r.controller);
    bucket.push_back(&r);
  }

  std::vector<ControllerSummary> summaries;
  for (const std::string& controller : order) {
    const auto& bucket = by_controller[controller];
    ControllerSummary summary;
    summary.controller = controller;
    summary.episodes = static_cast<int>(bucket.size());
    for (const EpisodeReport* r : bucket) {
      summary.means.video_kbps += r->means.video_kbps;
      summary.means.quality += r->means.quality;
      summary.means.playback_fps += r->means.playback_fps;
      summary.means.frame_delay_s += r->means.frame_delay_s;
      summary.means.rtt_s += r->means.rtt_s;
      summary.means.loss_rate += r->means.loss_rate;
    }
    const double inv = 1.0 / static_cast<double>(bucket.size());
    summary.means.video_kbps *= inv;
    summary.means.quality *= inv;
    summary.means.playback_fps *= inv;
    summary.means.frame_delay_s *= inv;
    summary.means.rtt_s *= inv;
    summary.means.loss_rate *= inv;

    for (Metric metric : kMetrics) {
      std::vector<double> pooled;
      for (const EpisodeReport* r : bucket) {
        for (const QoERecord& record : r->records) {
          pooled.push_back(MetricOf(record, metric));
        }
      }
      summary.cdfs[metric] = MakeCdf(std::move(pooled));
    }
    summaries.push_back(std::move(summary));
  }
  return summaries;
}

}  // namespace mabr::eval
