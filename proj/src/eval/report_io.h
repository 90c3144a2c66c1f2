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

#ifndef MABR_EVAL_REPORT_IO_H_
#define MABR_EVAL_REPORT_IO_H_

#include <string>
#include <vector>

#include "eval/qoe.h"

namespace mabr::eval {

// reports/<controller>_<trace>_<seed>.json
void WriteEpisodeJson(const EpisodeReport& report, const std::string& path);
EpisodeReport ReadEpisodeJson(const std::string& path);

// cdf_<controller>_<metric>.csv with `value,cum_fraction` rows.
void WriteCdfCsv(const Cdf& cdf, const std::string& path);

// Aligned text table: one row per controller, the four reported metrics.
std::string RenderSummaryTable(const std::vector<ControllerSummary>& summaries);

// Baseline-vs-candidate table with per-metric relative deltas.
std::string RenderCompareTable(const std::vector<ControllerSummary>& summaries,
                               const std::string& baseline_controller);

}  // namespace mabr::eval

#endif  // MABR_EVAL_REPORT_IO_H_
