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

#include "vrsketch/loss.hpp"

#include <cmath>
#include <vector>

#include "vrsketch/errors.hpp"
#include "vrsketch/log.hpp"

namespace vrsketch {

namespace {

void check_batch(const EmbeddingBatch& batch) {
  if (batch.sketches.cols() < 1) throw ArgumentError("loss: empty batch");
  if (batch.sketches.cols() != batch.shapes.cols() ||
      batch.sketches.rows() != batch.shapes.rows()) {
    throw ArgumentError("loss: sketch/shape embedding shapes disagree");
  }
}

}  // namespace

DenominatorVariant parse_denominator_variant(const std::string& name) {
  if (name == "cross_only") return DenominatorVariant::kCrossOnly;
  if (name == "cross_plus_sketch") return DenominatorVariant::kCrossPlusSketch;
  if (name == "cross_plus_shape") return DenominatorVariant::kCrossPlusShape;
  if (name == "full") return DenominatorVariant::kFull;
  throw ArgumentError("unknown denominator variant: " + name);
}

std::string denominator_variant_name(DenominatorVariant variant) {
  switch (variant) {
    case DenominatorVariant::kCrossOnly:
      return "cross_only";
    case DenominatorVariant::kCrossPlusSketch:
      return "cross_plus_sketch";
    case DenominatorVariant::kCrossPlusShape:
      return "cross_plus_shape";
    case DenominatorVariant::kFull:
      return "full";
  }
  return "full";
}

LossResult triplet_loss(const EmbeddingBatch& batch, const LossConfig& config, Rng* rng) {
  check_batch(batch);
  if (config.margin <= 0.0) throw ArgumentError("triplet_loss: margin must be positive");

  const Eigen::Index b_size = batch.batch_size();
  const Eigen::MatrixXd& s = batch.sketches;
  const Eigen::MatrixXd& z = batch.shapes;

  LossResult result;
  result.d_sketches = Eigen::MatrixXd::Zero(s.rows(), b_size);
  result.d_shapes = Eigen::MatrixXd::Zero(s.rows(), b_size);

  if (b_size < 2) {
    log_warn("triplet_loss: batch of size 1 has no negatives, loss is 0");
    return result;
  }

  // Squared cross distances via Gram products: ||s^a - z^b||^2.
  Eigen::VectorXd s_sq = s.colwise().squaredNorm();
  Eigen::VectorXd z_sq = z.colwise().squaredNorm();
  Eigen::MatrixXd cross = s.transpose() * z;  // B x B, (a, b) = s^a . z^b
  Eigen::MatrixXd d2 = (-2.0 * cross).colwise() + s_sq;
  d2.rowwise() += z_sq.transpose();

  // Negative selection per anchor.
  std::vector<std::vector<int>> negatives(b_size);
  if (config.negative_mode == NegativeMode::kAllPairs) {
    for (Eigen::Index a = 0; a < b_size; ++a) {
      for (Eigen::Index b = 0; b < b_size; ++b) {
        if (b != a) negatives[a].push_back(static_cast<int>(b));
      }
    }
  } else {
    if (rng == nullptr) {
      throw ArgumentError("triplet_loss: single-random-negative mode needs a generator");
    }
    for (Eigen::Index a = 0; a < b_size; ++a) {
      auto pick = static_cast<Eigen::Index>(rng->uniform_index(b_size - 1));
      if (pick >= a) ++pick;  // skip the positive
      negatives[a].push_back(static_cast<int>(pick));
    }
  }

  double total = 0.0;
  for (Eigen::Index a = 0; a < b_size; ++a) {
    for (int b : negatives[a]) {
      double term = d2(a, a) - d2(a, b) + config.margin;
      if (term > 0.0) {
        total += term;
        result.d_sketches.col(a) += 2.0 * (z.col(b) - z.col(a));
        result.d_shapes.col(a) += -2.0 * (s.col(a) - z.col(a));
        result.d_shapes.col(b) += 2.0 * (s.col(a) - z.col(b));
      }
    }
  }

  double scale = config.mean_over_anchors ? 1.0 / static_cast<double>(b_size) : 1.0;
  result.value = total * scale;
  if (scale != 1.0) {
    result.d_sketches *= scale;
    result.d_shapes *= scale;
  }
  return result;
}

LossResult contrastive_loss(const EmbeddingBatch& batch, const LossConfig& config) {
  check_batch(batch);
  if (config.temperature <= 0.0) {
    throw ArgumentError("contrastive_loss: temperature must be positive");
  }

  const Eigen::Index b_size = batch.batch_size();
  const double tau = config.temperature;
  const Eigen::MatrixXd& s = batch.sketches;
  const Eigen::MatrixXd& z = batch.shapes;
  const bool with_sketch = config.denominator == DenominatorVariant::kCrossPlusSketch ||
                           config.denominator == DenominatorVariant::kFull;
  const bool with_shape = config.denominator == DenominatorVariant::kCrossPlusShape ||
                          config.denominator == DenominatorVariant::kFull;

  Eigen::MatrixXd cross = s.transpose() * z / tau;  // (a, b) = s^a . z^b / tau
  Eigen::MatrixXd ss = with_sketch ? Eigen::MatrixXd(s.transpose() * s / tau) : Eigen::MatrixXd();
  Eigen::MatrixXd zz = with_shape ? Eigen::MatrixXd(z.transpose() * z / tau) : Eigen::MatrixXd();

  LossResult result;
  result.d_sketches = Eigen::MatrixXd::Zero(s.rows(), b_size);
  result.d_shapes = Eigen::MatrixXd::Zero(s.rows(), b_size);

  double total = 0.0;
  for (Eigen::Index a = 0; a < b_size; ++a) {
    // Log-sum-exp over the denominator terms of anchor a.
    double max_e = cross.row(a).maxCoeff();
    if (with_sketch) {
      for (Eigen::Index b = 0; b < b_size; ++b) {
        if (b != a) max_e = std::max(max_e, ss(a, b));
      }
    }
    if (with_shape) {
      for (Eigen::Index b = 0; b < b_size; ++b) {
        if (b != a) max_e = std::max(max_e, zz(a, b));
      }
    }

    double denom = 0.0;
    for (Eigen::Index b = 0; b < b_size; ++b) denom += std::exp(cross(a, b) - max_e);
    if (with_sketch) {
      for (Eigen::Index b = 0; b < b_size; ++b) {
        if (b != a) denom += std::exp(ss(a, b) - max_e);
      }
    }
    if (with_shape) {
      for (Eigen::Index b = 0; b < b_size; ++b) {
        if (b != a) denom += std::exp(zz(a, b) - max_e);
      }
    }

    double log_denominator = max_e + std::log(denom);
    total += -cross(a, a) + log_denominator;

    // Softmax weights w_i = exp(e_i) / D(a); they sum to 1 per anchor.
    result.d_sketches.col(a) -= z.col(a) / tau;
    for (Eigen::Index b = 0; b < b_size; ++b) {
      double w_cross = std::exp(cross(a, b) - max_e) / denom;
      result.d_sketches.col(a) += w_cross / tau * z.col(b);
      result.d_shapes.col(b) += w_cross / tau * s.col(a);
      if (b != a) {
        if (with_sketch) {
          double w_ss = std::exp(ss(a, b) - max_e) / denom;
          result.d_sketches.col(a) += w_ss / tau * s.col(b);
          result.d_sketches.col(b) += w_ss / tau * s.col(a);
        }
        if (with_shape) {
          double w_zz = std::exp(zz(a, b) - max_e) / denom;
          result.d_shapes.col(a) += w_zz / tau * z.col(b);
          result.d_shapes.col(b) += w_zz / tau * z.col(a);
        }
      }
    }
    result.d_shapes.col(a) -= s.col(a) / tau;
  }

  double scale = config.mean_over_anchors ? 1.0 / static_cast<double>(b_size) : 1.0;
  result.value = total * scale;
  if (scale != 1.0) {
    result.d_sketches *= scale;
    result.d_shapes *= scale;
  }
  return result;
}

LossResult compute_loss(const EmbeddingBatch& batch, const LossConfig& config, Rng* rng) {
  return config.kind == LossKind::kTriplet ? triplet_loss(batch, config, rng)
                                           : contrastive_loss(batch, config);
}

}  // namespace vrsketch
