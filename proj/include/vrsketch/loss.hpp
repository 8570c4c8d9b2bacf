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
#include <optional>
#include <string>

#include "vrsketch/rng.hpp"

namespace vrsketch {

enum class LossKind { kTriplet, kContrastive };

// Which similarity sums enter the contrastive denominator. `kFull` adds both
// in-modality sums to the cross-modal one and is the default.
enum class DenominatorVariant { kCrossOnly, kCrossPlusSketch, kCrossPlusShape, kFull };

// How negatives are drawn for the triplet loss. The all-pairs reading sums
// over every other shape in the batch; the single-random reading draws one
// negative per anchor from a seeded generator.
enum class NegativeMode { kAllPairs, kSingleRandom };

struct LossConfig {
  LossKind kind = LossKind::kTriplet;
  double margin = 0.3;
  double temperature = 0.1;
  DenominatorVariant denominator = DenominatorVariant::kFull;
  NegativeMode negative_mode = NegativeMode::kAllPairs;
  // Reduction over anchors: raw sum by default, mean when true. Reports state
  // which reduction is active.
  bool mean_over_anchors = false;
};

DenominatorVariant parse_denominator_variant(const std::string& name);
std::string denominator_variant_name(DenominatorVariant variant);

// One mini-batch of paired embeddings: column a of `sketches` is the anchor
// s^a and column a of `shapes` its positive z^a.
struct EmbeddingBatch {
  Eigen::MatrixXd sketches;  // d x B
  Eigen::MatrixXd shapes;    // d x B

  Eigen::Index batch_size() const { return sketches.cols(); }
};

struct LossResult {
  double value = 0.0;
  Eigen::MatrixXd d_sketches;  // dL/ds, d x B
  Eigen::MatrixXd d_shapes;    // dL/dz, d x B
};

// Hinge loss over all (anchor, negative) pairs in the batch:
//   L = sum_a sum_{b != a} max(0, ||s^a - z^a||^2 - ||s^a - z^b||^2 + m).
// The subgradient at an exactly-zero hinge is taken as 0. A singleton batch
// has no negatives and returns 0 with a warning. `rng` is consulted only in
// single-random-negative mode.
LossResult triplet_loss(const EmbeddingBatch& batch, const LossConfig& config,
                        Rng* rng = nullptr);

// Softmax contrast of the matched pair against the configured denominator:
//   L = -sum_a log( exp(s^a . z^a / tau) / D(a) )
// where D(a) always contains sum_b exp(s^a . z^b / tau) and, per variant, the
// sketch-sketch and shape-shape sums over b != a.
LossResult contrastive_loss(const EmbeddingBatch& batch, const LossConfig& config);

// Dispatch on config.kind.
LossResult compute_loss(const EmbeddingBatch& batch, const LossConfig& config,
                        Rng* rng = nullptr);

}  // namespace vrsketch
