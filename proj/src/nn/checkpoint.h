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

#ifndef MABR_NN_CHECKPOINT_H_
#define MABR_NN_CHECKPOINT_H_

#include <string>

#include "nn/network.h"

namespace mabr::nn {

// Versioned binary checkpoint: magic + header (dims, head kind, init seed,
// stage tag, frozen columns) followed by raw little-endian doubles in
// ForEachTensor order. Round-trips bit-exactly.
void SaveCheckpoint(const PolicyParameters& params, const std::string& path);
PolicyParameters LoadCheckpoint(const std::string& path);

}  // namespace mabr::nn

#endif  // MABR_NN_CHECKPOINT_H_
