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

#include "nn/network.h"

#include <cmath>
#include <type_traits>

#include "agents/agents.h"
#include "common/error.h"
#include "common/rng.h"

namespace mabr::nn {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd Sigmoid(const VectorXd& x) {
  return 1.0 / (1.0 + (-x.array()).exp());
}

VectorXd Relu(const VectorXd& x) { return x.cwiseMax(0.0); }

VectorXd ReluGrad(const VectorXd& pre) {
  return (pre.array() > 0.0).cast<double>();
}

}  // namespace

TensorSet TensorSet::Zero(const NetworkSpec& spec) {
  TensorSet t;
  t.gru.wz = MatrixXd::Zero(spec.gru_units, spec.input_dim);
  t.gru.wr = MatrixXd::Zero(spec.gru_units, spec.input_dim);
  t.gru.wc = MatrixXd::Zero(spec.gru_units, spec.input_dim);
  t.gru.uz = MatrixXd::Zero(spec.gru_units, spec.gru_units);
  t.gru.ur = MatrixXd::Zero(spec.gru_units, spec.gru_units);
  t.gru.uc = MatrixXd::Zero(spec.gru_units, spec.gru_units);
  t.gru.bz = VectorXd::Zero(spec.gru_units);
  t.gru.br = VectorXd::Zero(spec.gru_units);
  t.gru.bc = VectorXd::Zero(spec.gru_units);
  t.fc1.w = MatrixXd::Zero(spec.fc1_units, spec.gru_units);
  t.fc1.b = VectorXd::Zero(spec.fc1_units);
  t.fc2.w = MatrixXd::Zero(spec.fc2_units, spec.fc1_units);
  t.fc2.b = VectorXd::Zero(spec.fc2_units);
  t.head.w = MatrixXd::Zero(spec.head_dim, spec.fc2_units);
  t.head.b = VectorXd::Zero(spec.head_dim);
  return t;
}

void TensorSet::Add(const TensorSet& other, double scale) {
  ForEachTensorPair(*this, other,
                    [scale](auto& a, const auto& b) { a += scale * b; });
}

void TensorSet::Scale(double factor) {
  ForEachTensor(*this, [factor](auto& t) { t *= factor; });
}

double TensorSet::SquaredNorm() const {
  double acc = 0.0;
  ForEachTensor(*this, [&acc](const auto& t) { acc += t.squaredNorm(); });
  return acc;
}

bool TensorSet::AllFinite() const {
  bool ok = true;
  ForEachTensor(*this, [&ok](const auto& t) { ok = ok && t.allFinite(); });
  return ok;
}

ForwardResult Forward(const PolicyParameters& params,
                      const MatrixXd& sequence,
                      const VectorXd* initial_hidden) {
  const NetworkSpec& spec = params.spec;
  if (sequence.rows() != agents::kHistoryLen ||
      sequence.cols() != spec.input_dim) {
    throw ContractError("Forward: sequence shape mismatch");
  }
  const auto steps = static_cast<int>(sequence.rows());
  const TensorSet& w = params.weights;

  ForwardResult result;
  ForwardTrace& trace = result.trace;
  trace.inputs = sequence;
  trace.h.reserve(steps + 1);
  trace.h.push_back(initial_hidden != nullptr
                        ? *initial_hidden
                        : VectorXd::Zero(spec.gru_units));

  for (int k = 0; k < steps; ++k) {
    const VectorXd x = sequence.row(k).transpose();
    const VectorXd& h_prev = trace.h.back();
    const VectorXd z = Sigmoid(w.gru.wz * x + w.gru.uz * h_prev + w.gru.bz);
    const VectorXd r = Sigmoid(w.gru.wr * x + w.gru.ur * h_prev + w.gru.br);
    const VectorXd c =
        (w.gru.wc * x + w.gru.uc * r.cwiseProduct(h_prev) + w.gru.bc)
            .array()
            .tanh();
    const VectorXd h =
        (1.0 - z.array()) * h_prev.array() + z.array() * c.array();
    trace.z.push_back(z);
    trace.r.push_back(r);
    trace.c.push_back(c);
    trace.h.push_back(h);
  }

  trace.fc1_pre = w.fc1.w * trace.h.back() + w.fc1.b;
  trace.fc1_out = Relu(trace.fc1_pre);
  trace.fc2_pre = w.fc2.w * trace.fc1_out + w.fc2.b;
  trace.fc2_out = Relu(trace.fc2_pre);
  trace.head_out = w.head.w * trace.fc2_out + w.head.b;

  result.head_out = trace.head_out;
  if (spec.head == NetworkSpec::Head::kSoftmax) {
    const double max_logit = trace.head_out.maxCoeff();
    VectorXd exps = (trace.head_out.array() - max_logit).exp();
    result.probs = exps / exps.sum();
  } else {
    result.value = trace.head_out[0];
  }
  return result;
}

GradientBundle Backward(const PolicyParameters& params,
                        const ForwardTrace& trace,
                        const VectorXd& head_grad) {
  const NetworkSpec& spec = params.spec;
  if (head_grad.size() != spec.head_dim) {
    throw ContractError("Backward: head gradient dimension mismatch");
  }
  const TensorSet& w = params.weights;
  GradientBundle g = TensorSet::Zero(spec);

  g.head.w = head_grad * trace.fc2_out.transpose();
  g.head.b = head_grad;
  VectorXd d_fc2 =
      (w.head.w.transpose() * head_grad).cwiseProduct(ReluGrad(trace.fc2_pre));
  g.fc2.w = d_fc2 * trace.fc1_out.transpose();
  g.fc2.b = d_fc2;
  VectorXd d_fc1 =
      (w.fc2.w.transpose() * d_fc2).cwiseProduct(ReluGrad(trace.fc1_pre));
  g.fc1.w = d_fc1 * trace.h.back().transpose();
  g.fc1.b = d_fc1;

  // Backpropagation through time. dh is d loss / d h_k.
  VectorXd dh = w.fc1.w.transpose() * d_fc1;
  const auto steps = static_cast<int>(trace.z.size());
  for (int k = steps - 1; k >= 0; --k) {
    const VectorXd x = trace.inputs.row(k).transpose();
    const VectorXd& h_prev = trace.h[k];
    const VectorXd& z = trace.z[k];
    const VectorXd& r = trace.r[k];
    const VectorXd& c = trace.c[k];

    // h_k = (1 - z) * h_prev + z * c
    const VectorXd dz_pre = dh.array() * (c - h_prev).array() * z.array() *
                            (1.0 - z.array());
    const VectorXd dc_pre =
        dh.array() * z.array() * (1.0 - c.array().square());
    VectorXd dh_prev = dh.cwiseProduct(VectorXd::Ones(dh.size()) - z);

    g.gru.wc += dc_pre * x.transpose();
    g.gru.uc += dc_pre * r.cwiseProduct(h_prev).transpose();
    g.gru.bc += dc_pre;
    const VectorXd d_rh = w.gru.uc.transpose() * dc_pre;
    const VectorXd dr_pre =
        d_rh.array() * h_prev.array() * r.array() * (1.0 - r.array());
    dh_prev += d_rh.cwiseProduct(r);

    g.gru.wr += dr_pre * x.transpose();
    g.gru.ur += dr_pre * h_prev.transpose();
    g.gru.br += dr_pre;
    dh_prev += w.gru.ur.transpose() * dr_pre;

    g.gru.wz += dz_pre * x.transpose();
    g.gru.uz += dz_pre * h_prev.transpose();
    g.gru.bz += dz_pre;
    dh_prev += w.gru.uz.transpose() * dz_pre;

    dh = dh_prev;
  }

  for (int col : params.frozen_input_columns) {
    if (col < 0 || col >= spec.input_dim) {
      throw ContractError("Backward: frozen column outside input range");
    }
    g.gru.wz.col(col).setZero();
    g.gru.wr.col(col).setZero();
    g.gru.wc.col(col).setZero();
  }
  return g;
}

PolicyParameters Init(const NetworkSpec& spec, uint64_t seed) {
  PolicyParameters params;
  params.spec = spec;
  params.init_seed = seed;
  params.weights = TensorSet::Zero(spec);
  Rng rng(DeriveSeed(seed, "nn-init"));
  // Glorot uniform per matrix; biases stay zero. Row-major fill order keeps
  // initialization independent of Eigen's storage layout.
  ForEachTensor(params.weights, [&rng](auto& tensor) {
    if constexpr (std::is_same_v<std::decay_t<decltype(tensor)>,
                                 Eigen::VectorXd>) {
      return;  // biases stay zero
    } else {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(tensor.rows() + tensor.cols()));
    for (Eigen::Index i = 0; i < tensor.rows(); ++i) {
      for (Eigen::Index j = 0; j < tensor.cols(); ++j) {
        tensor(i, j) = rng.Uniform(-limit, limit);
      }
    }
    }
  });
  return params;
}

double LogProb(const VectorXd& probs, int action) {
  if (action < 0 || action >= probs.size()) {
    throw ContractError("LogProb: action index out of range");
  }
  return std::log(std::max(probs[action], 1e-300));
}

double Entropy(const VectorXd& probs) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) h -= probs[i] * std::log(probs[i]);
  }
  return h;
}

int Argmax(const VectorXd& probs) {
  Eigen::Index idx = 0;
  probs.maxCoeff(&idx);
  return static_cast<int>(idx);
}

}  // namespace mabr::nn
