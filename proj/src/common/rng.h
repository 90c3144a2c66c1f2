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

#ifndef MABR_COMMON_RNG_H_
#define MABR_COMMON_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace mabr {

// Deterministic random source. All distributions are derived from the raw
// mt19937_64 stream with fully specified arithmetic, so a given seed yields
// the same sequence on every platform and standard library. Never use
// std::uniform_*_distribution or std::normal_distribution for anything that
// feeds a checkpoint or a report; their output is implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n). n must be > 0. Modulo bias is negligible for
  // the small n used here (action sets, trace counts).
  uint64_t UniformInt(uint64_t n) { return engine_() % n; }

  // Standard normal via Box-Muller; caches the second variate.
  double Normal();

  bool Bernoulli(double p) { return Uniform() < p; }

 private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

// Stable seed derivation: folds a tag string into a master seed so that
// independent consumers (channel noise, codec noise, rollout sampling, ...)
// get decorrelated but reproducible streams.
uint64_t DeriveSeed(uint64_t master, std::string_view tag);

// Extra mixing for per-index streams (episode k, worker k).
uint64_t DeriveSeed(uint64_t master, std::string_view tag, uint64_t index);

}  // namespace mabr

#endif  // MABR_COMMON_RNG_H_
