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

#ifndef MABR_MARL_PPO_H_
#define MABR_MARL_PPO_H_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "common/config.h"
#include "nn/network.h"

namespace mabr::marl {

struct PpoConfig {
  double clip = 0.2;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double entropy_beta = 0.01;
  double entropy_beta_min = 1e-4;
  double entropy_decay = 0.5;
  int stagnation_epochs = 100;
  int epochs_per_update = 4;
  double learning_rate = 3e-4;
  int rollout_steps = 2048;
  int minibatch = 256;
  double critic_coef = 0.5;
  double grad_clip = 0.5;

  static PpoConfig FromConfig(const Config& config);
};

// One actor-update minibatch: per sample the observation sequence, the taken
// action, the behavior log-prob and the normalized advantage.
struct ActorBatch {
  std::vector<Eigen::MatrixXd> sequences;
  std::vector<int> actions;
  std::vector<double> old_log_probs;
  std::vector<double> advantages;

  size_t size() const { return sequences.size(); }
};

struct CriticBatch {
  std::vector<Eigen::MatrixXd> sequences;
  std::vector<double> returns;

  size_t size() const { return sequences.size(); }
};

struct ActorLossResult {
  double loss = 0.0;       // -mean(clipped surrogate) - beta * mean(entropy)
  double surrogate = 0.0;  // mean(min(ratio*A, clip(ratio)*A))
  double entropy = 0.0;    // mean policy entropy
  int skipped = 0;         // samples dropped for non-finite ratios
  nn::GradientBundle grads;
};

// Clipped-surrogate policy loss with an entropy bonus, averaged over the
// batch, plus its exact gradient. The entropy term enters the minimized loss
// with a negative sign so a larger beta pushes toward broader policies.
ActorLossResult PpoActorLoss(const nn::PolicyParameters& actor,
                             const ActorBatch& batch, double clip,
                             double entropy_beta);

struct CriticLossResult {
  double loss = 0.0;  // critic_coef * mean squared error to returns
  nn::GradientBundle grads;
};

CriticLossResult CriticLoss(const nn::PolicyParameters& critic,
                            const CriticBatch& batch, double critic_coef);

// Normalizes advantages in place to zero mean and unit standard deviation.
// A zero-variance batch is left centered only.
void NormalizeAdvantages(std::vector<double>* advantages);

// Halves the entropy weight (down to the floor) whenever the best epoch-mean
// reward has not improved for `stagnation_epochs` consecutive epochs.
class EntropyScheduler {
 public:
  EntropyScheduler(double beta, double beta_min, double decay,
                   int stagnation_epochs)
      : beta_(beta),
        beta_min_(beta_min),
        decay_(decay),
        stagnation_epochs_(stagnation_epochs) {}

  double Update(double epoch_mean_reward);
  double beta() const { return beta_; }

 private:
  double beta_;
  double beta_min_;
  double decay_;
  int stagnation_epochs_;
  bool has_best_ = false;
  double best_ = 0.0;
  int stagnant_ = 0;
};

}  // namespace mabr::marl

#endif  // MABR_MARL_PPO_H_
