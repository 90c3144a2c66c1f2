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

#include "marl/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "common/error.h"
#include "marl/gae.h"
#include "nn/adam.h"
#include "nn/checkpoint.h"

namespace mabr::marl {
namespace {

using agents::AgentKind;

// One rollout record: the observation the behavior policy saw, what it did,
// and what came back.
struct Sample {
  Eigen::MatrixXd sequence;
  int action = 0;
  double log_prob = 0.0;
  double value = 0.0;
  double reward = 0.0;
  bool done = false;
};

EnvOptions FoundationEnvOptions(AgentKind kind, const TrainOptions& options) {
  EnvOptions env;
  env.max_seconds = options.episode_s;
  // Stationary setting: start mid-range and pin the two foreign factors.
  env.initial.rate_factor = options.pinned_rf;
  env.initial.resolution = options.pinned_resolution;
  env.initial.frame_rate = options.pinned_fps;
  switch (kind) {
    case AgentKind::kQua:
      env.pinned_resolution = options.pinned_resolution;
      env.pinned_fps = options.pinned_fps;
      break;
    case AgentKind::kRes:
      env.pinned_rf = options.pinned_rf;
      env.pinned_fps = options.pinned_fps;
      break;
    case AgentKind::kFr:
      env.pinned_rf = options.pinned_rf;
      env.pinned_resolution = options.pinned_resolution;
      break;
  }
  return env;
}

EnvOptions TeamEnvOptions(const TrainOptions& options) {
  EnvOptions env;
  env.initial = options.initial;
  env.max_seconds = options.episode_s;
  return env;
}

void ShuffleIndices(std::vector<size_t>* indices, Rng& rng) {
  for (size_t i = indices->size(); i-- > 1;) {
    const size_t j = rng.UniformInt(i + 1);
    std::swap((*indices)[i], (*indices)[j]);
  }
}

struct UpdateStats {
  double surrogate = 0.0;
  double entropy = 0.0;
  double value_loss = 0.0;
  int batches = 0;
};

// Runs epochs_per_update passes of minibatch PPO over one agent's rollout.
UpdateStats UpdatePolicy(nn::PolicyParameters* actor, nn::AdamOptimizer* opt_a,
                         nn::PolicyParameters* critic,
                         nn::AdamOptimizer* opt_c,
                         const std::vector<Sample>& buffer,
                         const std::vector<Eigen::MatrixXd>* critic_sequences,
                         const std::vector<double>& advantages,
                         const std::vector<double>& returns,
                         const PpoConfig& ppo, double beta, Rng& shuffle_rng) {
  UpdateStats stats;
  std::vector<size_t> order(buffer.size());
  std::iota(order.begin(), order.end(), 0);
  const auto minibatch = static_cast<size_t>(std::max(1, ppo.minibatch));

  for (int pass = 0; pass < ppo.epochs_per_update; ++pass) {
    ShuffleIndices(&order, shuffle_rng);
    for (size_t start = 0; start < order.size(); start += minibatch) {
      const size_t end = std::min(order.size(), start + minibatch);
      ActorBatch ab;
      CriticBatch cb;
      for (size_t pos = start; pos < end; ++pos) {
        const size_t i = order[pos];
        ab.sequences.push_back(buffer[i].sequence);
        ab.actions.push_back(buffer[i].action);
        ab.old_log_probs.push_back(buffer[i].log_prob);
        ab.advantages.push_back(advantages[i]);
        cb.sequences.push_back(critic_sequences != nullptr
                                   ? (*critic_sequences)[i]
                                   : buffer[i].sequence);
        cb.returns.push_back(returns[i]);
      }
      ActorLossResult al = PpoActorLoss(*actor, ab, ppo.clip, beta);
      nn::ClipGradNorm(&al.grads, ppo.grad_clip);
      opt_a->Step(actor, al.grads, ppo.learning_rate);

      if (critic != nullptr) {
        CriticLossResult cl = CriticLoss(*critic, cb, ppo.critic_coef);
        nn::ClipGradNorm(&cl.grads, ppo.grad_clip);
        opt_c->Step(critic, cl.grads, ppo.learning_rate);
        stats.value_loss += cl.loss;
      }
      stats.surrogate += al.surrogate;
      stats.entropy += al.entropy;
      ++stats.batches;
    }
  }
  if (stats.batches > 0) {
    stats.surrogate /= stats.batches;
    stats.entropy /= stats.batches;
    stats.value_loss /= stats.batches;
  }
  return stats;
}

void GaeOverBuffer(const std::vector<Sample>& buffer, double bootstrap,
                   const PpoConfig& ppo, std::vector<double>* advantages,
                   std::vector<double>* returns) {
  std::vector<double> rewards, values;
  std::vector<bool> dones;
  rewards.reserve(buffer.size());
  values.reserve(buffer.size() + 1);
  dones.reserve(buffer.size());
  for (const Sample& s : buffer) {
    rewards.push_back(s.reward);
    values.push_back(s.value);
    dones.push_back(s.done);
  }
  values.push_back(bootstrap);
  GaeResult gae = Gae(rewards, values, dones, ppo.gamma, ppo.gae_lambda);
  *advantages = std::move(gae.advantages);
  *returns = std::move(gae.returns);
  NormalizeAdvantages(advantages);
}

}  // namespace

EpisodeProvider::EpisodeProvider(std::vector<trace::NetworkTrace> networks,
                                 std::vector<trace::ContentTrace> contents,
                                 const EnvContext& context, uint64_t seed)
    : networks_(std::move(networks)),
      contents_(std::move(contents)),
      context_(context),
      seed_(seed) {
  if (networks_.empty() || contents_.empty()) {
    throw ContractError("EpisodeProvider: need traces");
  }
}

std::unique_ptr<MambaEnv> EpisodeProvider::Next(const EnvOptions& options) {
  const uint64_t k = episode_counter_++;
  const auto net_index = static_cast<size_t>(k % networks_.size());
  const auto content_index = static_cast<size_t>(
      DeriveSeed(seed_, "episode-content", k) % contents_.size());
  return std::make_unique<MambaEnv>(networks_[net_index],
                                    contents_[content_index], context_, options,
                                    DeriveSeed(seed_, "episode-env", k));
}

TrainOptions TrainOptions::FromConfig(const Config& config, uint64_t seed) {
  TrainOptions o;
  o.seed = seed;
  o.pinned_rf = config.GetInt("train.pinned_rf");
  o.pinned_resolution =
      codec::ParseResolution(config.GetString("train.pinned_resolution"));
  o.pinned_fps = config.GetInt("train.pinned_fps");
  o.initial.rate_factor = config.GetInt("train.initial_rf");
  o.initial.resolution =
      codec::ParseResolution(config.GetString("train.initial_resolution"));
  o.initial.frame_rate = config.GetInt("train.initial_fps");
  o.episode_s = config.GetDouble("train.episode_s");
  o.res_rollout_divisor = config.GetInt("train.res_rollout_divisor");
  return o;
}

nn::NetworkSpec ActorSpec(AgentKind kind) {
  nn::NetworkSpec spec;
  spec.input_dim = agents::kNumFeatures;
  spec.head = nn::NetworkSpec::Head::kSoftmax;
  spec.head_dim = agents::ActionSpace::Size(kind);
  return spec;
}

nn::NetworkSpec LocalCriticSpec() {
  nn::NetworkSpec spec;
  spec.input_dim = agents::kNumFeatures;
  spec.head = nn::NetworkSpec::Head::kScalar;
  spec.head_dim = 1;
  return spec;
}

nn::NetworkSpec CentralCriticSpec() {
  nn::NetworkSpec spec;
  spec.input_dim = agents::GlobalState::kSequenceCols;
  spec.head = nn::NetworkSpec::Head::kScalar;
  spec.head_dim = 1;
  return spec;
}

int SampleCategorical(Rng& rng, const Eigen::VectorXd& probs) {
  const double u = rng.Uniform();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size() - 1);
}

int ActionIndexOf(AgentKind kind, const codec::EncoderConfig& config) {
  switch (kind) {
    case AgentKind::kQua: {
      // The hold action (+0 delta).
      const auto& deltas = agents::ActionSpace::QuaDeltas();
      for (size_t i = 0; i < deltas.size(); ++i) {
        if (deltas[i] == 0) return static_cast<int>(i);
      }
      return 0;
    }
    case AgentKind::kRes: {
      const auto& options = agents::ActionSpace::ResOptions();
      for (size_t i = 0; i < options.size(); ++i) {
        if (options[i] == config.resolution) return static_cast<int>(i);
      }
      return 0;
    }
    case AgentKind::kFr: {
      const auto& rates = agents::ActionSpace::FrRates();
      for (size_t i = 0; i < rates.size(); ++i) {
        if (rates[i] == config.frame_rate) return static_cast<int>(i);
      }
      return 0;
    }
  }
  return 0;
}

void WriteTrainLog(const std::vector<TrainLogRow>& rows,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write training log: " + path);
  out << "epoch,stage,agent,mean_reward,surrogate,value_loss,entropy,beta\n";
  char buf[256];
  for (const TrainLogRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%s,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                  r.epoch, r.stage.c_str(), r.agent.c_str(), r.mean_reward,
                  r.surrogate, r.value_loss, r.entropy, r.beta);
    out << buf;
  }
}

FoundationResult TrainFoundation(AgentKind kind, EpisodeProvider& provider,
                                 const PpoConfig& ppo,
                                 const TrainOptions& options) {
  const std::string agent_name = agents::AgentKindName(kind);
  FoundationResult result;
  result.actor = nn::Init(
      ActorSpec(kind),
      DeriveSeed(options.seed, "foundation-actor", static_cast<uint64_t>(kind)));
  result.critic = nn::Init(
      LocalCriticSpec(),
      DeriveSeed(options.seed, "foundation-critic", static_cast<uint64_t>(kind)));
  const std::vector<int> frozen = agents::FoundationMaskedFeatures(kind);
  result.actor.frozen_input_columns = frozen;
  result.critic.frozen_input_columns = frozen;
  result.actor.stage_tag = "foundation-" + agent_name;
  result.critic.stage_tag = "foundation-" + agent_name + "-critic";

  nn::AdamOptimizer opt_actor(result.actor.spec);
  nn::AdamOptimizer opt_critic(result.critic.spec);
  Rng sample_rng(DeriveSeed(options.seed, "foundation-sample",
                            static_cast<uint64_t>(kind)));
  Rng shuffle_rng(DeriveSeed(options.seed, "foundation-shuffle",
                             static_cast<uint64_t>(kind)));
  EntropyScheduler scheduler(ppo.entropy_beta, ppo.entropy_beta_min,
                             ppo.entropy_decay, ppo.stagnation_epochs);
  double beta = ppo.entropy_beta;

  const EnvOptions env_options = FoundationEnvOptions(kind, options);
  std::unique_ptr<MambaEnv> env;
  int rollout = ppo.rollout_steps;
  if (kind == AgentKind::kRes) {
    // A res decision spans 10 base intervals; shorter rollouts keep wall
    // time per epoch comparable across agents.
    rollout = std::max(64, rollout / std::max(1, options.res_rollout_divisor));
  }

  try {
    for (int epoch = 1; epoch <= options.epochs; ++epoch) {
      std::vector<Sample> buffer;
      buffer.reserve(rollout);
      double reward_sum = 0.0;
      while (static_cast<int>(buffer.size()) < rollout) {
        if (env == nullptr || env->done()) env = provider.Next(env_options);
        const agents::AgentObservation obs = env->Observe(kind, true);
        const Eigen::MatrixXd seq = obs.Sequence();
        nn::ForwardResult fwd = nn::Forward(result.actor, seq);
        const int action = SampleCategorical(sample_rng, fwd.probs);

        Sample sample;
        sample.sequence = seq;
        sample.action = action;
        sample.log_prob = nn::LogProb(fwd.probs, action);
        sample.value = nn::Forward(result.critic, seq).value;

        if (kind == AgentKind::kRes) {
          double acc = 0.0;
          int count = 0;
          bool done = false;
          for (int s = 0; s < agents::kResSubintervals && !done; ++s) {
            MambaEnv::StepResult sr =
                env->Step(std::nullopt,
                          s == 0 ? std::optional<int>(action) : std::nullopt,
                          std::nullopt);
            acc += sr.reward;
            ++count;
            done = sr.done;
          }
          sample.reward = acc / count;
          sample.done = done;
        } else {
          MambaEnv::StepResult sr =
              kind == AgentKind::kQua
                  ? env->Step(action, std::nullopt, std::nullopt)
                  : env->Step(std::nullopt, std::nullopt, action);
          sample.reward = sr.reward;
          sample.done = sr.done;
        }
        reward_sum += sample.reward;
        buffer.push_back(std::move(sample));
      }

      double bootstrap = 0.0;
      if (!buffer.back().done) {
        bootstrap =
            nn::Forward(result.critic, env->Observe(kind, true).Sequence()).value;
      }
      std::vector<double> advantages, returns;
      GaeOverBuffer(buffer, bootstrap, ppo, &advantages, &returns);

      UpdateStats stats =
          UpdatePolicy(&result.actor, &opt_actor, &result.critic, &opt_critic,
                       buffer, nullptr, advantages, returns, ppo, beta,
                       shuffle_rng);

      const double mean_reward = reward_sum / static_cast<double>(buffer.size());
      TrainLogRow row;
      row.epoch = epoch;
      row.stage = "foundation";
      row.agent = agent_name;
      row.mean_reward = mean_reward;
      row.surrogate = stats.surrogate;
      row.value_loss = stats.value_loss;
      row.entropy = stats.entropy;
      row.beta = beta;
      result.log.push_back(row);
      beta = scheduler.Update(mean_reward);
    }
  } catch (const ContractError&) {
    if (!options.abort_checkpoint_dir.empty()) {
      namespace fs = std::filesystem;
      fs::create_directories(options.abort_checkpoint_dir);
      nn::SaveCheckpoint(result.actor,
                         (fs::path(options.abort_checkpoint_dir) /
                          (agent_name + "_foundation_aborted.ckpt"))
                             .string());
    }
    throw;
  }
  return result;
}

TeamResult TrainTeam(const std::array<nn::PolicyParameters, 3>& stage1_actors,
                     EpisodeProvider& provider, const PpoConfig& ppo,
                     const TrainOptions& options) {
  constexpr AgentKind kKinds[3] = {AgentKind::kQua, AgentKind::kRes,
                                   AgentKind::kFr};
  TeamResult result;
  for (int a = 0; a < 3; ++a) {
    if (stage1_actors[a].spec != ActorSpec(kKinds[a])) {
      throw ContractError("TrainTeam: stage-1 checkpoint layout mismatch");
    }
    result.actors[a] = stage1_actors[a];
    result.actors[a].frozen_input_columns.clear();  // masks lifted
    result.actors[a].stage_tag =
        std::string("team-") + agents::AgentKindName(kKinds[a]);
  }
  result.critic = nn::Init(CentralCriticSpec(),
                           DeriveSeed(options.seed, "team-critic"));
  result.critic.stage_tag = "team-critic";

  std::array<std::unique_ptr<nn::AdamOptimizer>, 3> opt_actors;
  for (int a = 0; a < 3; ++a) {
    opt_actors[a] = std::make_unique<nn::AdamOptimizer>(result.actors[a].spec);
  }
  nn::AdamOptimizer opt_critic(result.critic.spec);
  Rng sample_rng(DeriveSeed(options.seed, "team-sample"));
  Rng shuffle_rng(DeriveSeed(options.seed, "team-shuffle"));
  EntropyScheduler scheduler(ppo.entropy_beta, ppo.entropy_beta_min,
                             ppo.entropy_decay, ppo.stagnation_epochs);
  double beta = ppo.entropy_beta;

  const EnvOptions env_options = TeamEnvOptions(options);
  std::unique_ptr<MambaEnv> env;
  int last_res_index = ActionIndexOf(AgentKind::kRes, options.initial);

  struct PendingRes {
    Sample sample;
    double acc = 0.0;
    int count = 0;
  };

  try {
    for (int epoch = 1; epoch <= options.epochs; ++epoch) {
      std::array<std::vector<Sample>, 3> buffers;  // qua, res, fr
      std::vector<Eigen::MatrixXd> critic_sequences;
      std::optional<PendingRes> pending_res;
      double reward_sum = 0.0;
      int base_steps = 0;

      while (base_steps < ppo.rollout_steps) {
        if (env == nullptr || env->done()) {
          env = provider.Next(env_options);
          last_res_index = ActionIndexOf(AgentKind::kRes, options.initial);
          pending_res.reset();
        }
        const agents::AgentObservation obs_q = env->Observe(AgentKind::kQua);
        const agents::AgentObservation obs_r = env->Observe(AgentKind::kRes);
        const agents::AgentObservation obs_f = env->Observe(AgentKind::kFr);

        nn::ForwardResult fwd_q =
            nn::Forward(result.actors[0], obs_q.Sequence());
        const int a_q = SampleCategorical(sample_rng, fwd_q.probs);
        nn::ForwardResult fwd_f =
            nn::Forward(result.actors[2], obs_f.Sequence());
        const int a_f = SampleCategorical(sample_rng, fwd_f.probs);

        std::optional<int> a_r;
        if (env->AtResBoundary()) {
          nn::ForwardResult fwd_r =
              nn::Forward(result.actors[1], obs_r.Sequence());
          const int action = SampleCategorical(sample_rng, fwd_r.probs);
          a_r = action;
          last_res_index = action;
          PendingRes pr;
          pr.sample.sequence = obs_r.Sequence();
          pr.sample.action = action;
          pr.sample.log_prob = nn::LogProb(fwd_r.probs, action);
          pending_res = std::move(pr);
        }

        // Centralized value: global state carries the actions being applied
        // this step.
        const agents::GlobalState global = agents::BuildGlobalState(
            obs_q, obs_r, obs_f, a_q, last_res_index, a_f);
        const Eigen::MatrixXd global_seq = global.ToSequence();
        const double value = nn::Forward(result.critic, global_seq).value;
        if (pending_res && pending_res->count == 0) {
          pending_res->sample.value = value;
        }

        MambaEnv::StepResult sr = env->Step(a_q, a_r, a_f);
        reward_sum += sr.reward;

        Sample sample_q;
        sample_q.sequence = obs_q.Sequence();
        sample_q.action = a_q;
        sample_q.log_prob = nn::LogProb(fwd_q.probs, a_q);
        sample_q.value = value;
        sample_q.reward = sr.reward;
        sample_q.done = sr.done;
        buffers[0].push_back(std::move(sample_q));

        Sample sample_f;
        sample_f.sequence = obs_f.Sequence();
        sample_f.action = a_f;
        sample_f.log_prob = nn::LogProb(fwd_f.probs, a_f);
        sample_f.value = value;
        sample_f.reward = sr.reward;
        sample_f.done = sr.done;
        buffers[2].push_back(std::move(sample_f));

        critic_sequences.push_back(global_seq);

        if (pending_res) {
          pending_res->acc += sr.reward;
          ++pending_res->count;
          if (pending_res->count == agents::kResSubintervals || sr.done) {
            pending_res->sample.reward = pending_res->acc / pending_res->count;
            pending_res->sample.done = sr.done;
            buffers[1].push_back(std::move(pending_res->sample));
            pending_res.reset();
          }
        }
        ++base_steps;
      }
      // A res decision cut by the rollout budget still becomes a sample with
      // the rewards seen so far.
      if (pending_res && pending_res->count > 0) {
        pending_res->sample.reward = pending_res->acc / pending_res->count;
        pending_res->sample.done = false;
        buffers[1].push_back(std::move(pending_res->sample));
        pending_res.reset();
      }

      // Bootstrap from the live state's centralized value.
      double bootstrap = 0.0;
      if (env != nullptr && !env->done()) {
        const agents::GlobalState global = agents::BuildGlobalState(
            env->Observe(AgentKind::kQua), env->Observe(AgentKind::kRes),
            env->Observe(AgentKind::kFr),
            ActionIndexOf(AgentKind::kQua, env->config()), last_res_index,
            ActionIndexOf(AgentKind::kFr, env->config()));
        bootstrap = nn::Forward(result.critic, global.ToSequence()).value;
      }

      for (int a = 0; a < 3; ++a) {
        if (buffers[a].empty()) continue;
        std::vector<double> advantages, returns;
        GaeOverBuffer(buffers[a], bootstrap, ppo, &advantages, &returns);
        const bool is_qua = a == 0;
        // The shared critic trains on the 0.1 s cadence stream (qua-aligned);
        // actor updates reuse their own advantages.
        UpdateStats stats = UpdatePolicy(
            &result.actors[a], opt_actors[a].get(),
            is_qua ? &result.critic : nullptr, is_qua ? &opt_critic : nullptr,
            buffers[a], is_qua ? &critic_sequences : nullptr, advantages,
            returns, ppo, beta, shuffle_rng);

        TrainLogRow row;
        row.epoch = epoch;
        row.stage = "team";
        row.agent = agents::AgentKindName(kKinds[a]);
        row.mean_reward = reward_sum / static_cast<double>(ppo.rollout_steps);
        row.surrogate = stats.surrogate;
        row.value_loss = stats.value_loss;
        row.entropy = stats.entropy;
        row.beta = beta;
        result.log.push_back(row);
      }

      beta = scheduler.Update(reward_sum / static_cast<double>(ppo.rollout_steps));
    }
  } catch (const ContractError&) {
    if (!options.abort_checkpoint_dir.empty()) {
      namespace fs = std::filesystem;
      fs::create_directories(options.abort_checkpoint_dir);
      for (int a = 0; a < 3; ++a) {
        nn::SaveCheckpoint(result.actors[a],
                           (fs::path(options.abort_checkpoint_dir) /
                            (std::string(agents::AgentKindName(kKinds[a])) +
                             "_team_aborted.ckpt"))
                               .string());
      }
    }
    throw;
  }
  return result;
}

}  // namespace mabr::marl
