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

#include "marl/ppo.h"

#include <algorithm>
#include <cmath>

#include "common/error.h"

namespace mabr::marl {

using Eigen::VectorXd;

PpoConfig PpoConfig::FromConfig(const Config& config) {
  PpoConfig c;
  c.clip = config.GetDouble("ppo.clip");
  c.gamma = config.GetDouble("ppo.gamma");
  c.gae_lambda = config.GetDouble("ppo.gae_lambda");
  c.entropy_beta = config.GetDouble("ppo.entropy_beta");
  c.entropy_beta_min = config.GetDouble("ppo.entropy_beta_min");
  c.entropy_decay = config.GetDouble("ppo.entropy_decay");
  c.stagnation_epochs = config.GetInt("ppo.stagnation_epochs");
  c.epochs_per_update = config.GetInt("ppo.epochs_per_update");
  c.learning_rate = config.GetDouble("ppo.learning_rate");
  c.rollout_steps = config.GetInt("ppo.rollout_steps");
  c.minibatch = config.GetInt("ppo.minibatch");
  c.critic_coef = config.GetDouble("ppo.critic_coef");
  c.grad_clip = config.GetDouble("ppo.grad_clip");
  return c;
}

ActorLossResult PpoActorLoss(const nn::PolicyParameters& actor,
                             const ActorBatch& batch, double clip,
                             double entropy_beta) {
  if (batch.size() == 0) throw ContractError("PpoActorLoss: empty batch");
  if (batch.actions.size() != batch.size() ||
      batch.old_log_probs.size() != batch.size() ||
      batch.advantages.size() != batch.size()) {
    throw ContractError("PpoActorLoss: ragged batch");
  }

  ActorLossResult result;
  result.grads = nn::TensorSet::Zero(actor.spec);
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  for (size_t i = 0; i < batch.size(); ++i) {
    nn::ForwardResult fwd = nn::Forward(actor, batch.sequences[i]);
    const int action = batch.actions[i];
    const double log_prob = nn::LogProb(fwd.probs, action);
    const double ratio = std::exp(log_prob - batch.old_log_probs[i]);
    if (!std::isfinite(ratio)) {
      ++result.skipped;
      continue;
    }
    const double advantage = batch.advantages[i];
    const double unclipped = ratio * advantage;
    const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip) * advantage;
    result.surrogate += std::min(unclipped, clipped) * inv_n;

    const double entropy = nn::Entropy(fwd.probs);
    result.entropy += entropy * inv_n;

    // d min(r*A, clip(r)*A) / d logits: zero where the clipped branch is
    // active (its derivative in r vanishes there), otherwise
    // A * r * (onehot - pi).
    VectorXd d_logits = VectorXd::Zero(fwd.probs.size());
    if (unclipped <= clipped) {
      VectorXd d_logprob = -fwd.probs;
      d_logprob[action] += 1.0;
      d_logits -= (advantage * ratio * inv_n) * d_logprob;
    }
    // Entropy bonus: d(-beta * H)/d logit_j = beta * pi_j * (log pi_j + H).
    if (entropy_beta != 0.0) {
      for (Eigen::Index j = 0; j < fwd.probs.size(); ++j) {
        const double p = fwd.probs[j];
        if (p > 0.0) {
          d_logits[j] += entropy_beta * inv_n * p * (std::log(p) + entropy);
        }
      }
    }
    result.grads.Add(nn::Backward(actor, fwd.trace, d_logits));
  }
  result.loss = -result.surrogate - entropy_beta * result.entropy;
  return result;
}

CriticLossResult CriticLoss(const nn::PolicyParameters& critic,
                            const CriticBatch& batch, double critic_coef) {
  if (batch.size() == 0) throw ContractError("CriticLoss: empty batch");
  if (batch.returns.size() != batch.size()) {
    throw ContractError("CriticLoss: ragged batch");
  }
  CriticLossResult result;
  result.grads = nn::TensorSet::Zero(critic.spec);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    nn::ForwardResult fwd = nn::Forward(critic, batch.sequences[i]);
    const double err = fwd.value - batch.returns[i];
    result.loss += critic_coef * err * err * inv_n;
    VectorXd head_grad(1);
    head_grad[0] = 2.0 * critic_coef * err * inv_n;
    result.grads.Add(nn::Backward(critic, fwd.trace, head_grad));
  }
  return result;
}

void NormalizeAdvantages(std::vector<double>* advantages) {
  if (advantages->empty()) return;
  double mean = 0.0;
  for (double a : *advantages) mean += a;
  mean /= static_cast<double>(advantages->size());
  double var = 0.0;
  for (double a : *advantages) var += (a - mean) * (a - mean);
  var /= static_cast<double>(advantages->size());
  const double stddev = std::sqrt(var);
  for (double& a : *advantages) {
    a -= mean;
    if (stddev > 1e-12) a /= stddev;
  }
}

double EntropyScheduler::Update(double epoch_mean_reward) {
  if (!has_best_ || epoch_mean_reward > best_) {
    best_ = epoch_mean_reward;
    has_best_ = true;
    stagnant_ = 0;
    return beta_;
  }
  ++stagnant_;
  if (stagnant_ >= stagnation_epochs_) {
    beta_ = std::max(beta_ * decay_, beta_min_);
    stagnant_ = 0;
  }
  return beta_;
}

}  // namespace mabr::marl
