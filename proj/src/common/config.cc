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

#include "common/config.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "common/error.h"

namespace mabr {
namespace {

struct KeyDefault {
  const char* key;
  const char* value;
};

// The full schema. Anything not listed here is rejected at parse time.
const KeyDefault kSchema[] = {
    // Discrete-time link simulation.
    {"sim.tick_s", "0.01"},
    {"sim.interval_s", "0.1"},
    {"sim.mtu_bytes", "1200"},
    {"sim.queue_capacity_ms", "500"},
    {"sim.base_rtt_ms", "40"},     // used when the trace carries no value
    {"sim.loss_rate", "0"},        // random loss when the trace carries none
    {"sim.max_playback_fps", "60"},

    // Parametric rate/quality encoder model.
    {"codec.b_s", "0.75"},            // resolution exponent of the rate model
    {"codec.b_t", "0.6"},             // frame-rate exponent of the rate model
    {"codec.k_t", "3.0"},             // frame-rate saturation of the quality model
    {"codec.c_q_min", "0.4"},         // rate-factor quality exponent at SI=0
    {"codec.c_q_max", "0.9"},         // ... at SI>=si_norm
    {"codec.d_s_min", "0.3"},         // downscale quality exponent at SI=0
    {"codec.d_s_max", "0.8"},         // ... at SI>=si_norm
    {"codec.si_norm", "100"},
    {"codec.rref_min_kbps", "2000"},  // reference bitrate at si+ti = 0
    {"codec.rref_max_kbps", "12000"}, // ... at si+ti >= rref_si_ti_norm
    {"codec.rref_si_ti_norm", "160"},
    {"codec.noise_sigma", "0.15"},    // log-normal per-frame size noise
    {"codec.rf_ref", "23"},           // rate factor at which bitrate = R_ref
    {"codec.keyframe_cost", "4.0"},   // size multiplier after an encoder restart

    // WebRTC-style baseline controller.
    {"gcc.rate_min_kbps", "200"},
    {"gcc.rate_max_kbps", "17000"},
    {"gcc.initial_rate_kbps", "1000"},
    {"gcc.loss_high", "0.10"},
    {"gcc.loss_low", "0.02"},
    {"gcc.increase_factor", "1.05"},
    {"gcc.overuse_factor", "0.85"},
    {"gcc.gamma_init_ms", "5"},
    {"gcc.gamma_min_ms", "1"},
    {"gcc.gamma_max_ms", "100"},
    {"gcc.gamma_adapt", "0.1"},
    {"gcc.slope_alpha", "0.5"},       // EWMA weight of the RTT slope filter
    {"gcc.overuse_sustain", "2"},     // consecutive over-threshold intervals
    {"gcc.bucket_threshold_intervals", "1.0"},
    {"gcc.res_thresholds_kbps", "0,1500,3500,6500"},  // 540p,720p,1080p,1440p
    {"gcc.capture_fps", "60"},

    // Observation normalization.
    {"agents.si_norm", "100"},
    {"agents.ti_norm", "100"},
    {"agents.rtt_norm_s", "1.0"},

    // QoE reward weights.
    {"reward.lambda", "1"},
    {"reward.nu", "8"},
    {"reward.mu", "6"},

    // PPO / MAPPO.
    {"ppo.clip", "0.2"},
    {"ppo.gamma", "0.99"},
    {"ppo.gae_lambda", "0.95"},
    {"ppo.entropy_beta", "0.01"},
    {"ppo.entropy_beta_min", "1e-4"},
    {"ppo.entropy_decay", "0.5"},
    {"ppo.stagnation_epochs", "100"},
    {"ppo.epochs_per_update", "4"},
    {"ppo.learning_rate", "3e-4"},
    {"ppo.rollout_steps", "2048"},
    {"ppo.minibatch", "256"},
    {"ppo.critic_coef", "0.5"},
    {"ppo.grad_clip", "0.5"},

    // Curriculum.
    {"train.foundation_epochs", "60"},
    {"train.team_epochs", "60"},
    {"train.pinned_rf", "23"},
    {"train.pinned_resolution", "1080p"},
    {"train.pinned_fps", "30"},
    {"train.initial_rf", "23"},
    {"train.initial_resolution", "1080p"},
    {"train.initial_fps", "60"},
    {"train.episode_s", "32"},
    {"train.res_rollout_divisor", "4"},  // res-agent rollouts are this much shorter

    // Evaluation.
    {"eval.episode_s", "0"},   // 0 = run the full trace
    {"eval.episodes_per_trace", "1"},

    // Synthetic content traces: per-profile SI/TI process constants.
    {"traces.content_dt_s", "0.1"},
    {"traces.low_motion.si_mean", "40"},
    {"traces.low_motion.si_spread", "15"},
    {"traces.low_motion.ti_mean", "5"},
    {"traces.low_motion.ti_spread", "3"},
    {"traces.conferencing.si_mean", "60"},
    {"traces.conferencing.si_spread", "15"},
    {"traces.conferencing.ti_mean", "12"},
    {"traces.conferencing.ti_spread", "6"},
    {"traces.gaming.si_mean", "90"},
    {"traces.gaming.si_spread", "20"},
    {"traces.gaming.ti_mean", "45"},
    {"traces.gaming.ti_spread", "15"},
    {"traces.sports.si_mean", "75"},
    {"traces.sports.si_spread", "20"},
    {"traces.sports.ti_mean", "60"},
    {"traces.sports.ti_spread", "18"},
};

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

Config::Config() {
  for (const auto& kv : kSchema) values_[kv.key] = kv.value;
}

Config Config::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Config config;
  std::vector<std::string> unknown;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (config.values_.count(key) == 0) {
      unknown.push_back(key);
      continue;
    }
    config.values_[key] = value;
  }
  if (!unknown.empty()) {
    std::string msg = path + ": unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
  return config;
}

void Config::ApplyOverride(const std::string& key_equals_value) {
  const auto eq = key_equals_value.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override must be key=value: " + key_equals_value);
  }
  Set(Trim(key_equals_value.substr(0, eq)),
      Trim(key_equals_value.substr(eq + 1)));
}

void Config::Set(const std::string& key, const std::string& value) {
  if (values_.count(key) == 0) {
    throw ConfigError("unknown config keys: " + key);
  }
  values_[key] = value;
}

double Config::GetDouble(const std::string& key) const {
  const std::string& raw = GetString(key);
  char* end = nullptr;
  const double value = std::strtod(raw.c_str(), &end);
  if (end == raw.c_str() || *end != '\0') {
    throw ConfigError("config key " + key + " is not a number: " + raw);
  }
  return value;
}

int Config::GetInt(const std::string& key) const {
  const double value = GetDouble(key);
  const int as_int = static_cast<int>(value);
  if (static_cast<double>(as_int) != value) {
    throw ConfigError("config key " + key + " is not an integer");
  }
  return as_int;
}

const std::string& Config::GetString(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config keys: " + key);
  return it->second;
}

std::vector<double> Config::GetDoubleList(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(GetString(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (item.empty()) continue;
    char* end = nullptr;
    out.push_back(std::strtod(item.c_str(), &end));
    if (end == item.c_str() || *end != '\0') {
      throw ConfigError("config key " + key + " has a non-numeric entry: " + item);
    }
  }
  return out;
}

void Config::Write(std::ostream& out) const {
  for (const auto& [key, value] : values_) {
    out << key << " = " << value << "\n";
  }
}

}  // namespace mabr
