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

#include "vrsketch/nn.hpp"

#include <cmath>
#include <cstring>

#include "vrsketch/errors.hpp"
#include "vrsketch/log.hpp"

namespace vrsketch::nn {

int ParameterSet::add(const std::string& name, int rows, int cols) {
  if (find(name) >= 0) throw ArgumentError("parameter registered twice: " + name);
  tensors_.push_back({name, Matrix::Zero(rows, cols)});
  return static_cast<int>(tensors_.size()) - 1;
}

int ParameterSet::find(const std::string& name) const {
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (tensors_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += static_cast<std::size_t>(t.value.size());
  return n;
}

std::uint64_t ParameterSet::fingerprint() const {
  std::uint64_t h = 14695981039346656037ull;
  auto mix_bytes = [&h](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& t : tensors_) {
    mix_bytes(t.name.data(), t.name.size());
    mix_bytes(t.value.data(), sizeof(double) * static_cast<std::size_t>(t.value.size()));
  }
  return h;
}

GradBuffer make_grad_buffer(const ParameterSet& params) {
  GradBuffer grads;
  grads.reserve(params.size());
  for (const auto& t : params.tensors()) {
    grads.push_back(Matrix::Zero(t.value.rows(), t.value.cols()));
  }
  return grads;
}

void zero_grad_buffer(GradBuffer& grads) {
  for (auto& g : grads) g.setZero();
}

void accumulate_grad_buffer(GradBuffer& dst, const GradBuffer& src) {
  if (dst.size() != src.size()) throw ArgumentError("grad buffer size mismatch");
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

LinearSpec add_linear(ParameterSet& params, const std::string& prefix, int in, int out) {
  LinearSpec spec;
  spec.weight = params.add(prefix + ".weight", out, in);
  spec.bias = params.add(prefix + ".bias", out, 1);
  return spec;
}

void glorot_init(ParameterSet& params, Rng& rng) {
  for (auto& t : params.tensors()) {
    if (t.value.cols() == 1 && t.name.size() >= 5 &&
        t.name.compare(t.name.size() - 5, 5, ".bias") == 0) {
      // Small positive offset: keeps the network inhomogeneous in its input
      // (zero biases would make ReLU chains degree-1 homogeneous, and the
      // final normalization would cancel global scale) and moves all-zero
      // padded group columns off the ReLU kink.
      t.value.setConstant(0.01);
      continue;
    }
    double limit = std::sqrt(6.0 / static_cast<double>(t.value.rows() + t.value.cols()));
    for (Eigen::Index j = 0; j < t.value.cols(); ++j) {
      for (Eigen::Index i = 0; i < t.value.rows(); ++i) {
        t.value(i, j) = rng.uniform(-limit, limit);
      }
    }
  }
}

MlpSpec add_mlp(ParameterSet& params, const std::string& prefix, int in,
                const std::vector<int>& widths, bool relu_after_last) {
  if (widths.empty()) throw ArgumentError("mlp needs at least one layer: " + prefix);
  MlpSpec spec;
  spec.relu_after_last = relu_after_last;
  int prev = in;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    spec.layers.push_back(add_linear(params, prefix + ".l" + std::to_string(i), prev, widths[i]));
    prev = widths[i];
  }
  return spec;
}

Matrix mlp_forward(const ParameterSet& params, const MlpSpec& spec, const Matrix& x,
                   MlpTrace* trace) {
  Matrix h = x;
  if (trace) {
    trace->acts.clear();
    trace->acts.push_back(h);
  }
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const Matrix& w = params.value(spec.layers[i].weight);
    const Matrix& b = params.value(spec.layers[i].bias);
    h = (w * h).colwise() + b.col(0);
    const bool relu = spec.relu_after_last || i + 1 < spec.layers.size();
    if (relu) h = h.cwiseMax(0.0);
    if (trace) trace->acts.push_back(h);
  }
  return h;
}

Matrix mlp_backward(const ParameterSet& params, const MlpSpec& spec, const MlpTrace& trace,
                    const Matrix& d_out, GradBuffer& grads) {
  if (trace.acts.size() != spec.layers.size() + 1) {
    throw ArgumentError("mlp trace does not match layer count");
  }
  Matrix d = d_out;
  for (int i = static_cast<int>(spec.layers.size()) - 1; i >= 0; --i) {
    const bool relu = spec.relu_after_last || i + 1 < static_cast<int>(spec.layers.size());
    if (relu) {
      // Post-ReLU output is positive exactly where the pre-activation was.
      d = (trace.acts[i + 1].array() > 0.0).select(d, Matrix::Zero(d.rows(), d.cols()));
    }
    const Matrix& x = trace.acts[i];
    grads[spec.layers[i].weight].noalias() += d * x.transpose();
    grads[spec.layers[i].bias].col(0) += d.rowwise().sum();
    d = (params.value(spec.layers[i].weight).transpose() * d).eval();
  }
  return d;
}

Matrix maxpool_groups(const Matrix& x, int group_size, Eigen::MatrixXi* argmax) {
  if (group_size < 1 || x.cols() % group_size != 0) {
    throw ArgumentError("maxpool_groups: columns not divisible by group size");
  }
  const Eigen::Index n_groups = x.cols() / group_size;
  Matrix out(x.rows(), n_groups);
  if (argmax) argmax->resize(x.rows(), n_groups);
  for (Eigen::Index g = 0; g < n_groups; ++g) {
    const Eigen::Index base = g * group_size;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      double best = x(r, base);
      Eigen::Index best_c = base;
      for (Eigen::Index j = 1; j < group_size; ++j) {
        if (x(r, base + j) > best) {
          best = x(r, base + j);
          best_c = base + j;
        }
      }
      out(r, g) = best;
      if (argmax) (*argmax)(r, g) = static_cast<int>(best_c);
    }
  }
  return out;
}

Matrix maxpool_groups_backward(const Matrix& d_out, const Eigen::MatrixXi& argmax,
                               Eigen::Index input_cols) {
  Matrix dx = Matrix::Zero(d_out.rows(), input_cols);
  for (Eigen::Index g = 0; g < d_out.cols(); ++g) {
    for (Eigen::Index r = 0; r < d_out.rows(); ++r) {
      dx(r, argmax(r, g)) += d_out(r, g);
    }
  }
  return dx;
}

Vector maxpool_all(const Matrix& x, Eigen::VectorXi* argmax) {
  if (x.cols() < 1) throw ArgumentError("maxpool_all: empty input");
  Vector out(x.rows());
  if (argmax) argmax->resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    Eigen::Index best_c = 0;
    double best = x(r, 0);
    for (Eigen::Index c = 1; c < x.cols(); ++c) {
      if (x(r, c) > best) {
        best = x(r, c);
        best_c = c;
      }
    }
    out(r) = best;
    if (argmax) (*argmax)(r) = static_cast<int>(best_c);
  }
  return out;
}

Matrix maxpool_all_backward(const Vector& d_out, const Eigen::VectorXi& argmax,
                            Eigen::Index input_cols) {
  Matrix dx = Matrix::Zero(d_out.size(), input_cols);
  for (Eigen::Index r = 0; r < d_out.size(); ++r) dx(r, argmax(r)) += d_out(r);
  return dx;
}

Vector l2_normalize(const Vector& x, double* norm_out, bool* fallback_out) {
  double norm = x.norm();
  if (norm_out) *norm_out = norm;
  if (norm < kNormalizeEpsilon) {
    log_warn("l2_normalize: zero pre-normalization vector, mapped to fixed basis vector");
    if (fallback_out) *fallback_out = true;
    Vector e = Vector::Zero(x.size());
    e(0) = 1.0;
    return e;
  }
  if (fallback_out) *fallback_out = false;
  return x / norm;
}

Vector l2_normalize_backward(const Vector& y, double norm, bool fallback, const Vector& d_out) {
  if (fallback) return Vector::Zero(y.size());
  return (d_out - y * y.dot(d_out)) / norm;
}

Optimizer::Optimizer(const OptimizerConfig& config, const ParameterSet& params)
    : config_(config) {
  if (config_.kind != "adam" && config_.kind != "sgd") {
    throw ArgumentError("unknown optimizer kind: " + config_.kind);
  }
  if (config_.learning_rate < 0.0) throw ArgumentError("negative learning rate");
  if (config_.kind == "adam") {
    for (const auto& t : params.tensors()) {
      m_.push_back(Matrix::Zero(t.value.rows(), t.value.cols()));
      v_.push_back(Matrix::Zero(t.value.rows(), t.value.cols()));
    }
  }
}

void Optimizer::step(ParameterSet& params, const GradBuffer& grads) {
  if (grads.size() != params.size()) throw ArgumentError("optimizer: grad buffer mismatch");
  ++t_;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix g = grads[i];
    if (config_.weight_decay > 0.0) g += config_.weight_decay * params.tensors()[i].value;
    if (config_.kind == "sgd") {
      params.tensors()[i].value -= config_.learning_rate * g;
      continue;
    }
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g.cwiseProduct(g);
    double bias1 = 1.0 - std::pow(config_.beta1, t_);
    double bias2 = 1.0 - std::pow(config_.beta2, t_);
    Matrix m_hat = m_[i] / bias1;
    Matrix v_hat = v_[i] / bias2;
    params.tensors()[i].value -=
        config_.learning_rate * (m_hat.array() / (v_hat.array().sqrt() + config_.epsilon)).matrix();
  }
}

}  // namespace vrsketch::nn
