// Copyright 2026-present the vrsketch-retrieval project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "vrsketch/rng.hpp"

namespace vrsketch::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct NamedTensor {
  std::string name;
  Matrix value;
};

// Owns a model's parameter tensors in a stable registration order. Gradients
// live outside in GradBuffers so read-only forward/backward passes can run
// concurrently against one parameter set.
class ParameterSet {
 public:
  int add(const std::string& name, int rows, int cols);

  Matrix& value(int handle) { return tensors_[handle].value; }
  const Matrix& value(int handle) const { return tensors_[handle].value; }
  const std::string& name(int handle) const { return tensors_[handle].name; }

  int find(const std::string& name) const;  // -1 when absent
  std::size_t size() const { return tensors_.size(); }
  const std::vector<NamedTensor>& tensors() const { return tensors_; }
  std::vector<NamedTensor>& tensors() { return tensors_; }

  std::size_t scalar_count() const;
  std::uint64_t fingerprint() const;  // FNV-1a over raw tensor bytes

 private:
  std::vector<NamedTensor> tensors_;
};

// One gradient matrix per parameter tensor, in registration order.
using GradBuffer = std::vector<Matrix>;

GradBuffer make_grad_buffer(const ParameterSet& params);
void zero_grad_buffer(GradBuffer& grads);
void accumulate_grad_buffer(GradBuffer& dst, const GradBuffer& src);

// -- layers -------------------------------------------------------------

struct LinearSpec {
  int weight = -1;
  int bias = -1;
};

// Registers a (out x in) weight and (out x 1) bias.
LinearSpec add_linear(ParameterSet& params, const std::string& prefix, int in, int out);

// Glorot-uniform weights, zero biases, deterministic in (seed, registration
// order).
void glorot_init(ParameterSet& params, Rng& rng);

// Shared per-point multilayer map: Linear+ReLU chain, optionally skipping the
// activation after the last layer (projection heads).
struct MlpSpec {
  std::vector<LinearSpec> layers;
  bool relu_after_last = true;
};

MlpSpec add_mlp(ParameterSet& params, const std::string& prefix, int in,
                const std::vector<int>& widths, bool relu_after_last = true);

// acts[0] is the input; acts[i + 1] the (post-activation) output of layer i.
struct MlpTrace {
  std::vector<Matrix> acts;
};

Matrix mlp_forward(const ParameterSet& params, const MlpSpec& spec, const Matrix& x,
                   MlpTrace* trace);

// Returns dL/dx and accumulates parameter gradients. The ReLU subgradient at
// exactly 0 is 0.
Matrix mlp_backward(const ParameterSet& params, const MlpSpec& spec, const MlpTrace& trace,
                    const Matrix& d_out, GradBuffer& grads);

// -- pooling ------------------------------------------------------------

// Row-wise max over consecutive column blocks of size group_size. argmax
// holds, per (row, group), the winning input column (first occurrence).
Matrix maxpool_groups(const Matrix& x, int group_size, Eigen::MatrixXi* argmax);
Matrix maxpool_groups_backward(const Matrix& d_out, const Eigen::MatrixXi& argmax,
                               Eigen::Index input_cols);

Vector maxpool_all(const Matrix& x, Eigen::VectorXi* argmax);
Matrix maxpool_all_backward(const Vector& d_out, const Eigen::VectorXi& argmax,
                            Eigen::Index input_cols);

// -- embedding normalization ---------------------------------------------

inline constexpr double kNormalizeEpsilon = 1e-12;

// Unit-hypersphere projection. A pre-normalization vector with norm below
// kNormalizeEpsilon maps to the first basis vector with a warning; its
// gradient is defined as zero.
Vector l2_normalize(const Vector& x, double* norm_out, bool* fallback_out);
Vector l2_normalize_backward(const Vector& y, double norm, bool fallback, const Vector& d_out);

// -- optimizers -----------------------------------------------------------

struct OptimizerConfig {
  std::string kind = "adam";  // "adam" or "sgd"
  double learning_rate = 1e-3;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adaptive-moment first-order optimizer with bias correction; plain SGD when
// configured.
class Optimizer {
 public:
  Optimizer(const OptimizerConfig& config, const ParameterSet& params);
  void step(ParameterSet& params, const GradBuffer& grads);
  const OptimizerConfig& config() const { return config_; }

 private:
  OptimizerConfig config_;
  int t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace vrsketch::nn
