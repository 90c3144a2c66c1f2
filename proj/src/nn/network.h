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

#ifndef MABR_NN_NETWORK_H_
#define MABR_NN_NETWORK_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mabr::nn {

// GRU(64) -> FC(64, ReLU) -> FC(32, ReLU) -> linear head. The softmax head
// produces an action distribution; the scalar head a value estimate. All
// math is double precision for reproducible gradient checks.
struct NetworkSpec {
  enum class Head { kSoftmax, kScalar };

  int input_dim = 0;
  int gru_units = 64;
  int fc1_units = 64;
  int fc2_units = 32;
  Head head = Head::kSoftmax;
  int head_dim = 1;

  bool operator==(const NetworkSpec&) const = default;
};

struct GruWeights {
  // Gate order: update (z), reset (r), candidate (c).
  Eigen::MatrixXd wz, wr, wc;  // [units x input]
  Eigen::MatrixXd uz, ur, uc;  // [units x units]
  Eigen::VectorXd bz, br, bc;
};

struct Dense {
  Eigen::MatrixXd w;  // [out x in]
  Eigen::VectorXd b;
};

// Weight container shared by parameters, gradients and optimizer moments.
struct TensorSet {
  GruWeights gru;
  Dense fc1, fc2, head;

  static TensorSet Zero(const NetworkSpec& spec);
  void Add(const TensorSet& other, double scale = 1.0);
  void Scale(double factor);
  double SquaredNorm() const;
  bool AllFinite() const;
};

// Applies fn to every tensor of the set, in a fixed order (gru wz, wr, wc,
// uz, ur, uc, bz, br, bc, fc1 w/b, fc2 w/b, head w/b).
template <typename Set, typename Fn>
void ForEachTensor(Set& set, Fn fn) {
  fn(set.gru.wz);
  fn(set.gru.wr);
  fn(set.gru.wc);
  fn(set.gru.uz);
  fn(set.gru.ur);
  fn(set.gru.uc);
  fn(set.gru.bz);
  fn(set.gru.br);
  fn(set.gru.bc);
  fn(set.fc1.w);
  fn(set.fc1.b);
  fn(set.fc2.w);
  fn(set.fc2.b);
  fn(set.head.w);
  fn(set.head.b);
}

template <typename SetA, typename SetB, typename Fn>
void ForEachTensorPair(SetA& a, SetB& b, Fn fn) {
  fn(a.gru.wz, b.gru.wz);
  fn(a.gru.wr, b.gru.wr);
  fn(a.gru.wc, b.gru.wc);
  fn(a.gru.uz, b.gru.uz);
  fn(a.gru.ur, b.gru.ur);
  fn(a.gru.uc, b.gru.uc);
  fn(a.gru.bz, b.gru.bz);
  fn(a.gru.br, b.gru.br);
  fn(a.gru.bc, b.gru.bc);
  fn(a.fc1.w, b.fc1.w);
  fn(a.fc1.b, b.fc1.b);
  fn(a.fc2.w, b.fc2.w);
  fn(a.fc2.b, b.fc2.b);
  fn(a.head.w, b.head.w);
  fn(a.head.b, b.head.b);
}

struct PolicyParameters {
  NetworkSpec spec;
  TensorSet weights;
  // Input columns whose gradients are forced to zero (foundation-course
  // feature freezing); indices into [0, input_dim).
  std::vector<int> frozen_input_columns;
  uint64_t init_seed = 0;
  std::string stage_tag;
};

using GradientBundle = TensorSet;

// Per-step activations kept for backpropagation through time.
struct ForwardTrace {
  Eigen::MatrixXd inputs;           // K x input_dim
  std::vector<Eigen::VectorXd> h;   // K+1 entries, h[0] = initial hidden
  std::vector<Eigen::VectorXd> z, r, c;
  Eigen::VectorXd fc1_pre, fc1_out, fc2_pre, fc2_out;
  Eigen::VectorXd head_out;         // logits or 1-dim value
};

struct ForwardResult {
  Eigen::VectorXd head_out;
  Eigen::VectorXd probs;  // softmax head only
  double value = 0.0;     // scalar head only
  ForwardTrace trace;
};

// Runs the network over a K-step sequence (rows oldest first). The hidden
// state starts at zero on every call; `initial_hidden` is a test hook.
// The sequence length must be kHistoryLen and the width input_dim.
ForwardResult Forward(const PolicyParameters& params,
                      const Eigen::MatrixXd& sequence,
                      const Eigen::VectorXd* initial_hidden = nullptr);

// Exact gradients of a scalar loss with head-preactivation gradient
// `head_grad` (d loss / d logits for the softmax head, d loss / d value for
// the scalar head). Gradients of frozen input columns are zeroed.
GradientBundle Backward(const PolicyParameters& params,
                        const ForwardTrace& trace,
                        const Eigen::VectorXd& head_grad);

// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases,
// deterministic per seed.
PolicyParameters Init(const NetworkSpec& spec, uint64_t seed);

// Distribution helpers for the softmax head.
double LogProb(const Eigen::VectorXd& probs, int action);
double Entropy(const Eigen::VectorXd& probs);
int Argmax(const Eigen::VectorXd& probs);

}  // namespace mabr::nn

#endif  // MABR_NN_NETWORK_H_
