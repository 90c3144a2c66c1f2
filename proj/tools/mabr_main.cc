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

// Command-line front end: synthesize traces, train the controllers, run
// evaluations and render comparison tables. Every artifact lands in a run
// directory that is reproducible from the config snapshot and the seed.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "common/config.h"
#include "common/error.h"
#include "eval/report_io.h"
#include "eval/runner.h"
#include "marl/trainer.h"
#include "nn/checkpoint.h"
#include "trace/traces.h"

namespace fs = std::filesystem;
using namespace mabr;

namespace {

Config LoadConfig(const std::string& config_path,
                  const std::vector<std::string>& overrides) {
  Config config = config_path.empty() ? Config() : Config::FromFile(config_path);
  for (const std::string& o : overrides) config.ApplyOverride(o);
  return config;
}

// <out>/<UTC timestamp>_seed<seed>, unless an explicit run dir is given.
fs::path MakeRunDir(const std::string& out, const std::string& run_dir,
                    uint64_t seed) {
  fs::path dir;
  if (!run_dir.empty()) {
    dir = run_dir;
  } else {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y%m%dT%H%M%S", std::gmtime(&tt));
    dir = fs::path(out) / (std::string(stamp) + "_seed" + std::to_string(seed));
  }
  fs::create_directories(dir);
  return dir;
}

void SnapshotConfig(const Config& config, const fs::path& run_dir,
                    uint64_t seed) {
  std::ofstream out(run_dir / "config_snapshot.cfg");
  out << "# seed " << seed << "\n";
  config.Write(out);
}

std::vector<trace::ContentTrace> LoadContentDir(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv" &&
        entry.path().filename().string().rfind("content_", 0) == 0) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw ConfigError("no content_*.csv traces in " + dir);
  }
  std::vector<trace::ContentTrace> contents;
  for (const auto& f : files) contents.push_back(trace::LoadContentTrace(f.string()));
  return contents;
}

std::array<nn::PolicyParameters, 3> LoadActors(const std::string& dir,
                                               const std::string& stage) {
  std::array<nn::PolicyParameters, 3> actors;
  const char* names[3] = {"qua", "res", "fr"};
  for (int a = 0; a < 3; ++a) {
    const fs::path path =
        fs::path(dir) / (std::string(names[a]) + "_" + stage + ".ckpt");
    if (!fs::exists(path)) {
      throw ConfigError("missing checkpoint: " + path.string());
    }
    actors[a] = nn::LoadCheckpoint(path.string());
  }
  return actors;
}

int CmdSynthTraces(const std::string& out_dir, int count, double duration_s,
                   uint64_t seed, const std::vector<std::string>& families,
                   const Config& config) {
  fs::create_directories(out_dir);
  std::vector<trace::NetworkFamily> fams;
  for (const auto& f : families) fams.push_back(trace::ParseNetworkFamily(f));
  if (fams.empty()) {
    fams = {trace::NetworkFamily::kStable, trace::NetworkFamily::kFluctuating,
            trace::NetworkFamily::kVolatile};
  }

  std::ofstream manifest(fs::path(out_dir) / "manifest.txt");
  for (int i = 0; i < count; ++i) {
    const trace::NetworkFamily family = fams[i % fams.size()];
    trace::NetworkTrace t = trace::SynthesizeNetworkTrace(
        family, duration_s, DeriveSeed(seed, "synth-net", i));
    t.id = std::string(trace::NetworkFamilyName(family)) + "_" + std::to_string(i);
    const std::string name = "net_" + t.id + ".csv";
    trace::WriteNetworkTrace(t, (fs::path(out_dir) / name).string());
    manifest << name << "\n";
  }

  const trace::ContentProfile profiles[] = {
      trace::ContentProfile::kLowMotion, trace::ContentProfile::kConferencing,
      trace::ContentProfile::kGaming, trace::ContentProfile::kSports};
  for (int i = 0; i < count; ++i) {
    const trace::ContentProfile profile = profiles[i % 4];
    trace::ContentTrace t = trace::SynthesizeContentTrace(
        profile, duration_s, DeriveSeed(seed, "synth-content", i), config);
    t.id = std::string(trace::ContentProfileName(profile)) + "_" + std::to_string(i);
    const std::string name = "content_" + t.id + ".csv";
    trace::WriteContentTrace(t, (fs::path(out_dir) / name).string());
  }
  std::printf("wrote %d network + %d content traces to %s\n", count, count,
              out_dir.c_str());
  return 0;
}

int CmdInspectTrace(const std::string& path, double resample_s) {
  trace::NetworkTrace t = trace::LoadNetworkTrace(path);
  if (resample_s > 0.0) t = trace::Resample(t, resample_s);
  double min_kbps = t.samples.front().kbps;
  double max_kbps = min_kbps;
  double sum = 0.0;
  for (const auto& s : t.samples) {
    min_kbps = std::min(min_kbps, s.kbps);
    max_kbps = std::max(max_kbps, s.kbps);
    sum += s.kbps;
  }
  std::printf("id: %s\nsamples: %zu\nduration_s: %.3f\n", t.id.c_str(),
              t.samples.size(), t.EndTime());
  std::printf("kbps mean/min/max: %.1f / %.1f / %.1f\n",
              sum / static_cast<double>(t.samples.size()), min_kbps, max_kbps);
  if (t.granularity_s > 0.0) {
    std::printf("granularity_s: %.3f\n", t.granularity_s);
  }
  return 0;
}

int CmdTrain(const Config& config, uint64_t seed, const fs::path& run_dir,
             const std::string& stage, const std::string& agent,
             const std::string& trace_manifest, const std::string& content_dir,
             const std::string& init_dir) {
  auto networks = trace::LoadManifest(trace_manifest);
  auto contents = LoadContentDir(content_dir);

  // Train on the 80% split; the held-out 20% stays for evaluation.
  std::vector<std::string> ids;
  for (const auto& n : networks) ids.push_back(n.id);
  const trace::TraceSplit split = trace::SplitTraces(ids, seed);
  std::vector<trace::NetworkTrace> train_traces;
  for (const auto& n : networks) {
    if (std::find(split.train.begin(), split.train.end(), n.id) !=
        split.train.end()) {
      train_traces.push_back(n);
    }
  }
  {
    std::ofstream split_file(run_dir / "trace_split.txt");
    for (const auto& id : split.train) split_file << "train " << id << "\n";
    for (const auto& id : split.test) split_file << "test " << id << "\n";
  }

  const marl::EnvContext context = marl::EnvContext::FromConfig(config);
  const marl::PpoConfig ppo = marl::PpoConfig::FromConfig(config);
  marl::TrainOptions options = marl::TrainOptions::FromConfig(config, seed);
  options.abort_checkpoint_dir = run_dir.string();
  marl::EpisodeProvider provider(train_traces, contents, context,
                                 DeriveSeed(seed, "train-episodes"));

  std::vector<marl::TrainLogRow> log;
  const bool foundation = stage == "foundation" || stage == "all";
  const bool team = stage == "team" || stage == "all";

  std::array<nn::PolicyParameters, 3> stage1;
  if (foundation) {
    options.epochs = config.GetInt("train.foundation_epochs");
    const std::vector<std::string> agent_names =
        agent == "all" ? std::vector<std::string>{"qua", "res", "fr"}
                       : std::vector<std::string>{agent};
    for (const std::string& name : agent_names) {
      const agents::AgentKind kind = agents::ParseAgentKind(name);
      provider.Reset();
      marl::FoundationResult result =
          marl::TrainFoundation(kind, provider, ppo, options);
      nn::SaveCheckpoint(result.actor,
                         (run_dir / (name + "_foundation.ckpt")).string());
      nn::SaveCheckpoint(
          result.critic,
          (run_dir / (name + "_foundation_critic.ckpt")).string());
      log.insert(log.end(), result.log.begin(), result.log.end());
      stage1[kind == agents::AgentKind::kQua   ? 0
             : kind == agents::AgentKind::kRes ? 1
                                               : 2] = result.actor;
      std::printf("foundation %s done (%d epochs)\n", name.c_str(),
                  options.epochs);
    }
  }
  if (team) {
    if (!foundation || agent != "all") {
      const std::string dir = init_dir.empty() ? run_dir.string() : init_dir;
      stage1 = LoadActors(dir, "foundation");
    }
    options.epochs = config.GetInt("train.team_epochs");
    provider.Reset();
    marl::TeamResult result = marl::TrainTeam(stage1, provider, ppo, options);
    const char* names[3] = {"qua", "res", "fr"};
    for (int a = 0; a < 3; ++a) {
      nn::SaveCheckpoint(result.actors[a],
                         (run_dir / (std::string(names[a]) + "_team.ckpt")).string());
    }
    nn::SaveCheckpoint(result.critic, (run_dir / "critic_team.ckpt").string());
    log.insert(log.end(), result.log.begin(), result.log.end());
    std::printf("team course done (%d epochs)\n", options.epochs);
  }
  marl::WriteTrainLog(log, (run_dir / "training_log.csv").string());
  std::printf("artifacts in %s\n", run_dir.string().c_str());
  return 0;
}

int CmdEval(const Config& config, uint64_t seed, const fs::path& run_dir,
            const std::vector<std::string>& controller_names,
            const std::string& trace_manifest, const std::string& content_dir,
            const std::string& checkpoint_dir, bool held_out_only,
            const std::string& event_log) {
  auto networks = trace::LoadManifest(trace_manifest);
  auto contents = LoadContentDir(content_dir);
  if (held_out_only) {
    std::vector<std::string> ids;
    for (const auto& n : networks) ids.push_back(n.id);
    const trace::TraceSplit split = trace::SplitTraces(ids, seed);
    std::vector<trace::NetworkTrace> test;
    for (const auto& n : networks) {
      if (std::find(split.test.begin(), split.test.end(), n.id) !=
          split.test.end()) {
        test.push_back(n);
      }
    }
    networks = std::move(test);
  }

  const marl::EnvContext context = marl::EnvContext::FromConfig(config);
  const gcc::GccParams gcc_params = gcc::GccParams::FromConfig(config);
  codec::EncoderConfig initial;
  initial.rate_factor = config.GetInt("train.initial_rf");
  initial.resolution =
      codec::ParseResolution(config.GetString("train.initial_resolution"));
  initial.frame_rate = config.GetInt("train.initial_fps");

  eval::RunOptions run_options;
  run_options.episode_s = config.GetDouble("eval.episode_s");
  const int episodes_per_trace = config.GetInt("eval.episodes_per_trace");

  eval::ControllerAssets assets;
  bool needs_actors = false;
  std::vector<eval::Controller> controllers;
  for (const auto& name : controller_names) {
    controllers.push_back(eval::ParseController(name));
    needs_actors = needs_actors ||
                   controllers.back() == eval::Controller::kMamba ||
                   controllers.back() == eval::Controller::kMambaBeta;
  }
  if (needs_actors) {
    if (checkpoint_dir.empty()) {
      throw ConfigError("mamba controllers need --checkpoints <dir>");
    }
    assets.actors = LoadActors(checkpoint_dir, "team");
  }

  const fs::path reports_dir = run_dir / "reports";
  fs::create_directories(reports_dir);

  std::vector<eval::EpisodeReport> reports;
  for (const eval::Controller controller : controllers) {
    for (size_t t = 0; t < networks.size(); ++t) {
      for (int e = 0; e < episodes_per_trace; ++e) {
        // Same (trace, episode) seed and content for every controller.
        const uint64_t episode_seed = DeriveSeed(seed, "eval-episode",
                                                 t * 1000 + e);
        const auto& content =
            contents[episode_seed % contents.size()];
        eval::EpisodeReport report =
            eval::RunEpisode(controller, networks[t], content, context,
                             gcc_params, initial, assets, run_options,
                             episode_seed);
        const std::string file = std::string(eval::ControllerName(controller)) +
                                 "_" + networks[t].id + "_" +
                                 std::to_string(e) + ".json";
        eval::WriteEpisodeJson(report, (reports_dir / file).string());
        reports.push_back(std::move(report));
      }
    }
    std::printf("evaluated %s on %zu trace(s)\n",
                eval::ControllerName(controller), networks.size());
  }

  const auto summaries = eval::Aggregate(reports);
  for (const auto& summary : summaries) {
    for (const auto& [metric, cdf] : summary.cdfs) {
      const std::string file = "cdf_" + summary.controller + "_" +
                               eval::MetricName(metric) + ".csv";
      eval::WriteCdfCsv(cdf, (run_dir / file).string());
    }
  }
  const std::string table = eval::RenderSummaryTable(summaries);
  std::ofstream(run_dir / "summary.txt") << table;
  std::fputs(table.c_str(), stdout);

  if (!event_log.empty()) {
    // Per-tick event log of the first trace under the gcc_on controller.
    std::ofstream sink(event_log);
    sink << "tick,queue_bytes,delivered,dropped\n";
    sim::VideoSession session(networks.front(), contents.front(), context.codec,
                              context.session, DeriveSeed(seed, "event-log"));
    session.set_event_log(&sink);
    codec::EncoderConfig config_el = initial;
    while (session.now_s() + context.session.interval_s <=
           std::min(networks.front().EndTime(), 10.0) + 1e-9) {
      session.StepInterval(config_el);
    }
  }
  std::printf("artifacts in %s\n", run_dir.string().c_str());
  return 0;
}

int CmdCompare(const std::string& run, const std::string& baseline) {
  std::vector<eval::EpisodeReport> reports;
  const fs::path reports_dir = fs::path(run) / "reports";
  if (!fs::is_directory(reports_dir)) {
    throw ConfigError("no reports/ under " + run);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(reports_dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) reports.push_back(eval::ReadEpisodeJson(f.string()));
  if (reports.empty()) throw ConfigError("no episode reports in " + run);

  const std::string table =
      eval::RenderCompareTable(eval::Aggregate(reports), baseline);
  std::ofstream(fs::path(run) / "compare.txt") << table;
  std::fputs(table.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trace-driven real-time video ABR simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--set", overrides, "config override key=value (repeatable)");

  // synth-traces
  auto* synth = app.add_subcommand("synth-traces", "generate synthetic traces");
  std::string synth_out = "traces";
  int synth_count = 16;
  double synth_duration = 120.0;
  uint64_t synth_seed = 0;
  std::vector<std::string> synth_families;
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--count", synth_count, "number of traces per kind");
  synth->add_option("--duration", synth_duration, "seconds per trace");
  synth->add_option("--seed", synth_seed, "seed")->required();
  synth->add_option("--families", synth_families,
                    "network families (stable fluctuating volatile stepdown)");

  // inspect-trace
  auto* inspect = app.add_subcommand("inspect-trace", "print trace statistics");
  std::string inspect_path;
  double inspect_resample = 0.0;
  inspect->add_option("trace", inspect_path, "trace csv")->required();
  inspect->add_option("--resample", inspect_resample, "granularity in seconds");

  // train
  auto* train = app.add_subcommand("train", "run the training curriculum");
  std::string train_out = "runs";
  std::string train_run_dir;
  std::string train_stage = "all";
  std::string train_agent = "all";
  std::string train_traces;
  std::string train_contents;
  std::string train_init;
  uint64_t train_seed = 0;
  bool train_seed_set = false;
  train->add_option("--out", train_out, "runs root directory");
  train->add_option("--run-dir", train_run_dir, "exact run directory");
  train->add_option("--stage", train_stage, "foundation|team|all");
  train->add_option("--agent", train_agent, "qua|res|fr|all (foundation)");
  train->add_option("--traces", train_traces, "network trace manifest")->required();
  train->add_option("--contents", train_contents, "content trace directory")->required();
  train->add_option("--init-dir", train_init, "stage-1 checkpoint dir (team)");
  train->add_option("--seed", train_seed, "seed")->required()
      ->each([&](const std::string&) { train_seed_set = true; });

  // eval
  auto* evalc = app.add_subcommand("eval", "run controllers over traces");
  std::string eval_out = "runs";
  std::string eval_run_dir;
  std::vector<std::string> eval_controllers = {"gcc_on"};
  std::string eval_traces;
  std::string eval_contents;
  std::string eval_checkpoints;
  std::string eval_event_log;
  bool eval_held_out = false;
  uint64_t eval_seed = 0;
  evalc->add_option("--out", eval_out, "runs root directory");
  evalc->add_option("--run-dir", eval_run_dir, "exact run directory");
  evalc->add_option("--controllers", eval_controllers,
                    "gcc_on gcc_off mamba mamba_beta");
  evalc->add_option("--traces", eval_traces, "network trace manifest")->required();
  evalc->add_option("--contents", eval_contents, "content trace directory")->required();
  evalc->add_option("--checkpoints", eval_checkpoints, "team checkpoint dir");
  evalc->add_option("--event-log", eval_event_log, "per-tick event CSV path");
  evalc->add_flag("--held-out", eval_held_out,
                  "evaluate only the 20% test split of the manifest");
  evalc->add_option("--seed", eval_seed, "seed")->required();

  // compare
  auto* compare = app.add_subcommand("compare", "table from an eval run dir");
  std::string compare_run;
  std::string compare_baseline = "gcc_on";
  compare->add_option("run", compare_run, "eval run directory")->required();
  compare->add_option("--baseline", compare_baseline, "baseline controller");

  CLI11_PARSE(app, argc, argv);

  try {
    const Config config = LoadConfig(config_path, overrides);
    if (synth->parsed()) {
      return CmdSynthTraces(synth_out, synth_count, synth_duration, synth_seed,
                            synth_families, config);
    }
    if (inspect->parsed()) {
      return CmdInspectTrace(inspect_path, inspect_resample);
    }
    if (train->parsed()) {
      (void)train_seed_set;
      const fs::path run_dir = MakeRunDir(train_out, train_run_dir, train_seed);
      SnapshotConfig(config, run_dir, train_seed);
      return CmdTrain(config, train_seed, run_dir, train_stage, train_agent,
                      train_traces, train_contents, train_init);
    }
    if (evalc->parsed()) {
      const fs::path run_dir = MakeRunDir(eval_out, eval_run_dir, eval_seed);
      SnapshotConfig(config, run_dir, eval_seed);
      return CmdEval(config, eval_seed, run_dir, eval_controllers, eval_traces,
                     eval_contents, eval_checkpoints, eval_held_out,
                     eval_event_log);
    }
    if (compare->parsed()) {
      return CmdCompare(compare_run, compare_baseline);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
