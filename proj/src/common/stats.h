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

#ifndef MABR_COMMON_STATS_H_
#define MABR_COMMON_STATS_H_

#include <vector>

namespace mabr {

double Mean(const std::vector<double>& xs);
double SampleVariance(const std::vector<double>& xs);  // unbiased (n-1)

// P(T <= t) for Student's t with `df` degrees of freedom.
double StudentTCdf(double t, double df);

// One-sided Welch test of H1: mean(a) > mean(b). Returns the p-value.
double WelchOneSidedPValue(const std::vector<double>& a,
                           const std::vector<double>& b);

}  // namespace mabr

#endif  // MABR_COMMON_STATS_H_
