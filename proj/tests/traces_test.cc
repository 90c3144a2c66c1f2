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

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "common/error.h"
#include "common/rng.h"
#include "trace/traces.h"

using namespace mabr;
namespace fs = std::filesystem;

namespace {

fs::path TempFile(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "mabr_traces_test";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream out(path);
  out << content;
  return path;
}

// Time integral of the zero-order-hold trace over [0, end).
double ZohIntegralOf(const trace::NetworkTrace& t, double end) {
  double acc = 0.0;
  for (size_t i = 0; i < t.samples.size(); ++i) {
    const double t0 = std::max(0.0, t.samples[i].t_s);
    const double t1 = i + 1 < t.samples.size() ? t.samples[i + 1].t_s : end;
    if (t1 > t0) acc += t.samples[i].kbps * (std::min(t1, end) - t0);
  }
  return acc;
}

}  // namespace

TEST_CASE("load parses two-column csv") {
  const auto path = TempFile("ok.csv", "0.0,5000\n0.5,3000\n");
  const trace::NetworkTrace t = trace::LoadNetworkTrace(path.string());
  REQUIRE(t.samples.size() == 2);
  CHECK(t.samples[0].kbps == 5000);
  CHECK(t.samples[1].kbps == 3000);
  CHECK(t.samples[1].t_s == 0.5);
}

TEST_CASE("load rejects non-increasing timestamps") {
  const auto path = TempFile("rev.csv", "0.5,3000\n0.0,5000\n");
  CHECK_THROWS_AS(trace::LoadNetworkTrace(path.string()), ParseError);
}

TEST_CASE("load names the offending line") {
  const auto path = TempFile("bad.csv", "0.0,5000\nnot-a-row\n");
  try {
    trace::LoadNetworkTrace(path.string());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("load rejects empty files") {
  const auto path = TempFile("empty.csv", "");
  CHECK_THROWS_AS(trace::LoadNetworkTrace(path.string()), ParseError);
}

TEST_CASE("240 rows at half-second spacing span 120 seconds") {
  std::string content;
  for (int i = 0; i < 240; ++i) {
    content += std::to_string(i * 0.5) + ",4000\n";
  }
  const auto path = TempFile("long.csv", content);
  const trace::NetworkTrace t = trace::LoadNetworkTrace(path.string());
  REQUIRE(t.samples.size() == 240);
  CHECK(t.samples.size() * 0.5 == doctest::Approx(120.0));
  CHECK(t.EndTime() == doctest::Approx(119.5));
}

TEST_CASE("resample leaves a constant trace constant") {
  trace::NetworkTrace t;
  t.id = "const";
  for (int i = 0; i < 10; ++i) t.samples.push_back({i * 0.3, 5000.0});
  const trace::NetworkTrace out = trace::Resample(t, 0.7);
  for (const auto& s : out.samples) CHECK(s.kbps == doctest::Approx(5000.0));
}

TEST_CASE("resample takes the time-weighted mean") {
  trace::NetworkTrace t;
  t.samples = {{0.0, 4000.0}, {0.25, 2000.0}};
  const trace::NetworkTrace out = trace::Resample(t, 0.5);
  REQUIRE(out.samples.size() == 1);
  // (0.25*4000 + 0.25*2000) / 0.5
  CHECK(out.samples[0].kbps == doctest::Approx(3000.0).epsilon(1e-12));
}

TEST_CASE("resample is idempotent at the same granularity") {
  Rng rng(7);
  trace::NetworkTrace t;
  for (int i = 0; i < 50; ++i) {
    t.samples.push_back({i * 0.5, 1000.0 + 9000.0 * rng.Uniform()});
  }
  const trace::NetworkTrace once = trace::Resample(t, 0.5);
  const trace::NetworkTrace twice = trace::Resample(once, 0.5);
  REQUIRE(once.samples.size() == t.samples.size());
  REQUIRE(twice.samples.size() == once.samples.size());
  for (size_t i = 0; i < once.samples.size(); ++i) {
    CHECK(once.samples[i].kbps == doctest::Approx(t.samples[i].kbps).epsilon(1e-12));
    CHECK(twice.samples[i].kbps ==
          doctest::Approx(once.samples[i].kbps).epsilon(1e-12));
    if (i > 0) {
      CHECK(once.samples[i].t_s - once.samples[i - 1].t_s ==
            doctest::Approx(0.5).epsilon(1e-12));
    }
  }
}

TEST_CASE("resample conserves the bandwidth integral") {
  Rng rng(11);
  for (int round = 0; round < 20; ++round) {
    trace::NetworkTrace t;
    double ts = 0.0;
    const int n = 5 + static_cast<int>(rng.UniformInt(40));
    for (int i = 0; i < n; ++i) {
      t.samples.push_back({ts, 500.0 + 9500.0 * rng.Uniform()});
      ts += 0.05 + 0.95 * rng.Uniform();
    }
    const double g = 0.2 + 0.8 * rng.Uniform();
    const trace::NetworkTrace out = trace::Resample(t, g);
    const double horizon = out.samples.back().t_s + g;
    const double in_integral = ZohIntegralOf(t, horizon);
    const double out_integral = ZohIntegralOf(out, horizon);
    // Slack: one granularity bin worth of the peak sample at each endpoint.
    CHECK(std::abs(in_integral - out_integral) <= 1e-6 * std::max(1.0, in_integral));
  }
}

TEST_CASE("split honors the 80/20 ratio") {
  std::vector<std::string> ids;
  for (int i = 0; i < 10; ++i) ids.push_back("t" + std::to_string(i));
  const trace::TraceSplit split = trace::SplitTraces(ids, 1);
  CHECK(split.train.size() == 8);
  CHECK(split.test.size() == 2);

  std::set<std::string> train(split.train.begin(), split.train.end());
  for (const auto& id : split.test) CHECK(train.count(id) == 0);
}

TEST_CASE("split of five ids is four-one") {
  const std::vector<std::string> ids = {"a", "b", "c", "d", "e"};
  const trace::TraceSplit split = trace::SplitTraces(ids, 42);
  CHECK(split.train.size() == 4);
  CHECK(split.test.size() == 1);
}

TEST_CASE("split is deterministic per seed") {
  std::vector<std::string> ids;
  for (int i = 0; i < 25; ++i) ids.push_back("t" + std::to_string(i));
  const trace::TraceSplit a = trace::SplitTraces(ids, 9);
  const trace::TraceSplit b = trace::SplitTraces(ids, 9);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  const trace::TraceSplit c = trace::SplitTraces(ids, 10);
  CHECK(a.train != c.train);
}

TEST_CASE("split needs at least two ids") {
  const std::vector<std::string> one = {"only"};
  CHECK_THROWS_AS(trace::SplitTraces(one, 1), ContractError);
}

TEST_CASE("content synthesis is deterministic") {
  const Config config;
  const auto a = trace::SynthesizeContentTrace(
      trace::ContentProfile::kConferencing, 120.0, 7, config);
  const auto b = trace::SynthesizeContentTrace(
      trace::ContentProfile::kConferencing, 120.0, 7, config);
  REQUIRE(a.samples.size() == b.samples.size());
  for (size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].si == b.samples[i].si);
    CHECK(a.samples[i].ti == b.samples[i].ti);
  }
}

TEST_CASE("gaming is more temporally complex than conferencing") {
  const Config config;
  for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    double ti_gaming = 0.0, ti_conf = 0.0;
    const auto g = trace::SynthesizeContentTrace(trace::ContentProfile::kGaming,
                                                 120.0, seed, config);
    const auto c = trace::SynthesizeContentTrace(
        trace::ContentProfile::kConferencing, 120.0, seed, config);
    for (const auto& s : g.samples) ti_gaming += s.ti;
    for (const auto& s : c.samples) ti_conf += s.ti;
    CHECK(ti_gaming / g.samples.size() > ti_conf / c.samples.size());
  }
}

TEST_CASE("content sample count is duration over dt") {
  const Config config;
  const auto t = trace::SynthesizeContentTrace(trace::ContentProfile::kSports,
                                               120.0, 3, config);
  CHECK(t.samples.size() == 1200);  // 0.1 s sampling
}

TEST_CASE("manifest applies per-trace overrides") {
  const auto trace_path = TempFile("m1.csv", "0,5000\n0.5,6000\n");
  const auto manifest = TempFile(
      "manifest.txt",
      "# comment\nm1.csv base_rtt_ms=60 loss_rate=0.01 id=custom\n");
  const auto traces = trace::LoadManifest(manifest.string());
  REQUIRE(traces.size() == 1);
  CHECK(traces[0].id == "custom");
  CHECK(traces[0].base_rtt_ms.value() == doctest::Approx(60.0));
  CHECK(traces[0].loss_rate.value() == doctest::Approx(0.01));
  (void)trace_path;
}

TEST_CASE("stepdown family is exact") {
  const auto t = trace::SynthesizeNetworkTrace(trace::NetworkFamily::kStepdown,
                                               20.0, 5);
  for (const auto& s : t.samples) {
    CHECK(s.kbps == (s.t_s < 10.0 ? 8000.0 : 2000.0));
  }
}
