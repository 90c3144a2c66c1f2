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

#include "eval/report_io.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "common/error.h"

namespace mabr::eval {
namespace {

using nlohmann::json;

json MeansToJson(const QoEMeans& means) {
  return json{{"video_kbps", means.video_kbps},
              {"quality", means.quality},
              {"playback_fps", means.playback_fps},
              {"frame_delay_s", means.frame_delay_s},
              {"rtt_s", means.rtt_s},
              {"loss_rate", means.loss_rate}};
}

QoEMeans MeansFromJson(const json& j) {
  QoEMeans means;
  means.video_kbps = j.at("video_kbps");
  means.quality = j.at("quality");
  means.playback_fps = j.at("playback_fps");
  means.frame_delay_s = j.at("frame_delay_s");
  means.rtt_s = j.at("rtt_s");
  means.loss_rate = j.at("loss_rate");
  return means;
}

}  // namespace

void WriteEpisodeJson(const EpisodeReport& report, const std::string& path) {
  json j;
  j["controller"] = report.controller;
  j["trace_id"] = report.trace_id;
  j["content_id"] = report.content_id;
  j["seed"] = report.seed;
  j["frames_skipped"] = report.frames_skipped;
  j["resolution_changes"] = report.resolution_changes;
  j["mean_target_kbps"] = report.mean_target_kbps;
  j["mean_abs_target_gap_kbps"] = report.mean_abs_target_gap_kbps;
  j["means"] = MeansToJson(report.means);
  json records = json::array();
  for (const QoERecord& r : report.records) {
    records.push_back(json::array({r.interval_index, r.video_kbps, r.quality,
                                   r.playback_fps, r.frame_delay_s, r.rtt_s,
                                   r.loss_rate}));
  }
  j["record_fields"] = {"interval_index", "video_kbps",    "quality",
                        "playback_fps",   "frame_delay_s", "rtt_s",
                        "loss_rate"};
  j["records"] = std::move(records);

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write report: " + path);
  out << j.dump(2) << "\n";
}

EpisodeReport ReadEpisodeJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open report: " + path);
  json j;
  in >> j;

  EpisodeReport report;
  report.controller = j.at("controller");
  report.trace_id = j.at("trace_id");
  report.content_id = j.at("content_id");
  report.seed = j.at("seed");
  report.frames_skipped = j.at("frames_skipped");
  report.resolution_changes = j.at("resolution_changes");
  report.mean_target_kbps = j.at("mean_target_kbps");
  report.mean_abs_target_gap_kbps = j.at("mean_abs_target_gap_kbps");
  report.means = MeansFromJson(j.at("means"));
  for (const json& r : j.at("records")) {
    QoERecord record;
    record.interval_index = r.at(0);
    record.video_kbps = r.at(1);
    record.quality = r.at(2);
    record.playback_fps = r.at(3);
    record.frame_delay_s = r.at(4);
    record.rtt_s = r.at(5);
    record.loss_rate = r.at(6);
    report.records.push_back(record);
  }
  return report;
}

void WriteCdfCsv(const Cdf& cdf, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write CDF: " + path);
  out << "value,cum_fraction\n";
  char buf[64];
  for (size_t i = 0; i < cdf.values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g\n", cdf.values[i],
                  cdf.fractions[i]);
    out << buf;
  }
}

std::string RenderSummaryTable(
    const std::vector<ControllerSummary>& summaries) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-12s %10s %12s %10s %12s %10s\n",
                "controller", "episodes", "video(kbps)", "quality",
                "delay(ms)", "fps");
  out << buf;
  for (const ControllerSummary& s : summaries) {
    std::snprintf(buf, sizeof(buf), "%-12s %10d %12.1f %10.2f %12.1f %10.2f\n",
                  s.controller.c_str(), s.episodes, s.means.video_kbps,
                  s.means.quality, s.means.rtt_s * 1000.0,
                  s.means.playback_fps);
    out << buf;
  }
  return out.str();
}

std::string RenderCompareTable(const std::vector<ControllerSummary>& summaries,
                               const std::string& baseline_controller) {
  const ControllerSummary* baseline = nullptr;
  for (const ControllerSummary& s : summaries) {
    if (s.controller == baseline_controller) baseline = &s;
  }
  if (baseline == nullptr) {
    throw ConfigError("compare: baseline controller not in the report set: " +
                      baseline_controller);
  }
  std::ostringstream out;
  out << RenderSummaryTable(summaries) << "\n";
  char buf[200];
  std::snprintf(buf, sizeof(buf), "deltas vs %s:\n", baseline_controller.c_str());
  out << buf;
  for (const ControllerSummary& s : summaries) {
    if (s.controller == baseline_controller) continue;
    const auto pct = [](double value, double base) {
      return base != 0.0 ? (value - base) / base * 100.0 : 0.0;
    };
    std::snprintf(buf, sizeof(buf),
                  "%-12s video %+6.1f%%  quality %+6.1f%%  delay %+6.1f%%  "
                  "fps %+6.1f%%\n",
                  s.controller.c_str(),
                  pct(s.means.video_kbps, baseline->means.video_kbps),
                  pct(s.means.quality, baseline->means.quality),
                  pct(s.means.rtt_s, baseline->means.rtt_s),
                  pct(s.means.playback_fps, baseline->means.playback_fps));
    out << buf;
  }
  return out.str();
}

}  // namespace mabr::eval
