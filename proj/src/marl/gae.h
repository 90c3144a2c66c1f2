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

#ifndef MABR_MARL_GAE_H_
#define MABR_MARL_GAE_H_

#include <vector>

namespace mabr::marl {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values[0..T)
};

// Generalized advantage estimation over a rollout of length T.
// values has T+1 entries (bootstrap appended); dones marks terminal steps,
// which cut both the TD target and the advantage recursion:
//   delta_t = r_t + gamma * V_{t+1} * (1 - done_t) - V_t
//   A_t     = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
GaeResult Gae(const std::vector<double>& rewards,
              const std::vector<double>& values,
              const std::vector<bool>& dones, double gamma, double lambda);

}  // namespace mabr::marl

#endif  // MABR_MARL_GAE_H_
