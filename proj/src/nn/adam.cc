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

#include "nn/adam.h"

#include <cmath>

#include "common/error.h"

namespace mabr::nn {

void AdamOptimizer::Step(PolicyParameters* params, GradientBundle grads,
                         double learning_rate) {
  if (!grads.AllFinite()) {
    throw ContractError("AdamOptimizer: non-finite gradient, step " +
                        std::to_string(t_ + 1));
  }
  for (int col : params->frozen_input_columns) {
    grads.gru.wz.col(col).setZero();
    grads.gru.wr.col(col).setZero();
    grads.gru.wc.col(col).setZero();
  }
  ++t_;
  const double bias1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));

  ForEachTensorPair(m_, grads, [](auto& m, const auto& g) {
    m = kBeta1 * m + (1.0 - kBeta1) * g;
  });
  ForEachTensorPair(v_, grads, [](auto& v, const auto& g) {
    v.array() = kBeta2 * v.array() + (1.0 - kBeta2) * g.array().square();
  });

  // theta -= lr * m_hat / (sqrt(v_hat) + eps)
  TensorSet update = m_;
  ForEachTensorPair(update, v_, [&](auto& u, const auto& v) {
    u.array() = (u.array() / bias1) /
                ((v.array() / bias2).sqrt() + kEpsilon);
  });
  params->weights.Add(update, -learning_rate);
}

void ClipGradNorm(GradientBundle* grads, double max_norm) {
  if (max_norm <= 0.0) return;
  const double norm = std::sqrt(grads->SquaredNorm());
  if (norm > max_norm) grads->Scale(max_norm / norm);
}

}  // namespace mabr::nn
