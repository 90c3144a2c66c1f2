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

#include "marl/gae.h"

#include "common/error.h"

namespace mabr::marl {

GaeResult Gae(const std::vector<double>& rewards,
              const std::vector<double>& values,
              const std::vector<bool>& dones, double gamma, double lambda) {
  const size_t steps = rewards.size();
  if (values.size() != steps + 1) {
    throw ContractError("Gae: need |values| = |rewards| + 1");
  }
  if (dones.size() != steps) {
    throw ContractError("Gae: need |dones| = |rewards|");
  }

  GaeResult result;
  result.advantages.resize(steps);
  result.returns.resize(steps);
  double running = 0.0;
  for (size_t i = steps; i-- > 0;) {
    const double not_done = dones[i] ? 0.0 : 1.0;
    const double delta =
        rewards[i] + gamma * values[i + 1] * not_done - values[i];
    running = delta + gamma * lambda * not_done * running;
    result.advantages[i] = running;
    result.returns[i] = running + values[i];
  }
  return result;
}

}  // namespace mabr::marl
