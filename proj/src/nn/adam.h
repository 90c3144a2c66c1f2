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

#ifndef MABR_NN_ADAM_H_
#define MABR_NN_ADAM_H_

#include "nn/network.h"

namespace mabr::nn {

// Adam with bias correction (beta1 0.9, beta2 0.999, eps 1e-8). Gradients of
// frozen input columns are zeroed before the moment update, so frozen
// weights never move. Throws on non-finite gradients.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(const NetworkSpec& spec)
      : m_(TensorSet::Zero(spec)), v_(TensorSet::Zero(spec)) {}

  void Step(PolicyParameters* params, GradientBundle grads,
            double learning_rate);

  int64_t step_count() const { return t_; }

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

 private:
  TensorSet m_, v_;
  int64_t t_ = 0;
};

// Scales the bundle down to `max_norm` if its global L2 norm exceeds it.
void ClipGradNorm(GradientBundle* grads, double max_norm);

}  // namespace mabr::nn

#endif  // MABR_NN_ADAM_H_
