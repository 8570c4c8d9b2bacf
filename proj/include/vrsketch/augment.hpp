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

#include <cmath>
#include <vector>

#include "vrsketch/geometry.hpp"
#include "vrsketch/rng.hpp"

namespace vrsketch {

// Training-time transform settings. Augmentations apply to sketches only
// unless augment_shapes overrides; the shape gallery is canonical.
struct AugmentConfig {
  bool rotation_enabled = false;  // drops accuracy, kept to reproduce that row
  int rotation_axis = 2;          // 0 = x, 1 = y, 2 = z (vertical)
  bool scale_enabled = false;
  double scale_lo = 0.9;
  double scale_hi = 1.1;
  bool renormalize_after = true;
  double synthetic_ratio = 0.0;  // synthetic records per human record
  bool augment_shapes = false;

  void validate() const;
};

// Rigid rotation about the configured vertical axis by an angle drawn
// uniformly from [0, 360) degrees; re-centered and re-normalized when
// renormalize_after is set.
PointCloud random_axis_rotation(const PointCloud& cloud, const AugmentConfig& config, Rng& rng);

// Deterministic form used by the random version and by tests.
PointCloud axis_rotation(const PointCloud& cloud, int axis, double radians,
                         bool renormalize_after);

// Global distortion: each axis scaled by an independent factor drawn from
// [scale_lo, scale_hi]; re-normalized when renormalize_after is set. The
// anisotropy survives the isotropic re-normalization.
PointCloud random_anisotropic_scale(const PointCloud& cloud, const AugmentConfig& config,
                                    Rng& rng);

PointCloud anisotropic_scale(const PointCloud& cloud, const Eigen::Vector3d& factors,
                             bool renormalize_after);

// Applies the enabled transforms in a fixed order (rotation, then scale).
PointCloud apply_augmentations(const PointCloud& cloud, const AugmentConfig& config, Rng& rng);

namespace detail {
void warn_synthetic_ratio(double ratio);
void check_synthetic_ratio(double ratio);
}  // namespace detail

// Training-set composition: the human records plus floor(ratio * |human|)
// synthetic records drawn seeded without replacement, capped at the synthetic
// pool size. Ratios above 2.0 warn (performance-degradation regime).
template <typename Record>
std::vector<Record> compose_training_set(const std::vector<Record>& human,
                                         const std::vector<Record>& synthetic, double ratio,
                                         Rng& rng) {
  detail::check_synthetic_ratio(ratio);
  if (ratio > 2.0) detail::warn_synthetic_ratio(ratio);

  std::vector<Record> out = human;
  auto want = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(human.size())));
  std::size_t take = std::min(want, synthetic.size());
  for (std::size_t i : rng.sample_without_replacement(synthetic.size(), take)) {
    out.push_back(synthetic[i]);
  }
  return out;
}

}  // namespace vrsketch
