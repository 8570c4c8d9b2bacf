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

#include "vrsketch/augment.hpp"

#include <cmath>

#include "vrsketch/errors.hpp"
#include "vrsketch/log.hpp"

namespace vrsketch {

void AugmentConfig::validate() const {
  if (scale_lo <= 0.0 || scale_lo > scale_hi) {
    throw ArgumentError("augment: scale range must satisfy 0 < lo <= hi");
  }
  if (synthetic_ratio < 0.0) throw ArgumentError("augment: synthetic_ratio must be >= 0");
  if (rotation_axis < 0 || rotation_axis > 2) throw ArgumentError("augment: bad rotation axis");
}

PointCloud axis_rotation(const PointCloud& cloud, int axis, double radians,
                         bool renormalize_after) {
  PointCloud rotated = rotate_cloud(cloud, rotation_about_axis(axis, radians));
  return renormalize_after ? normalize_cloud(rotated) : rotated;
}

PointCloud random_axis_rotation(const PointCloud& cloud, const AugmentConfig& config, Rng& rng) {
  config.validate();
  double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
  return axis_rotation(cloud, config.rotation_axis, theta, config.renormalize_after);
}

PointCloud anisotropic_scale(const PointCloud& cloud, const Eigen::Vector3d& factors,
                             bool renormalize_after) {
  if ((factors.array() <= 0.0).any()) {
    throw ArgumentError("anisotropic_scale: factors must be positive");
  }
  PointCloud scaled;
  scaled.points = factors.asDiagonal() * cloud.points;
  scaled.normalized = false;
  return renormalize_after ? normalize_cloud(scaled) : scaled;
}

PointCloud random_anisotropic_scale(const PointCloud& cloud, const AugmentConfig& config,
                                    Rng& rng) {
  config.validate();
  Eigen::Vector3d factors(rng.uniform(config.scale_lo, config.scale_hi),
                          rng.uniform(config.scale_lo, config.scale_hi),
                          rng.uniform(config.scale_lo, config.scale_hi));
  return anisotropic_scale(cloud, factors, config.renormalize_after);
}

PointCloud apply_augmentations(const PointCloud& cloud, const AugmentConfig& config, Rng& rng) {
  PointCloud out = cloud;
  if (config.rotation_enabled) out = random_axis_rotation(out, config, rng);
  if (config.scale_enabled) out = random_anisotropic_scale(out, config, rng);
  return out;
}

namespace detail {

void warn_synthetic_ratio(double ratio) {
  log_warn("compose_training_set: synthetic ratio " + std::to_string(ratio) +
           " exceeds 2.0, the regime where adding more synthetic sketches degrades accuracy");
}

void check_synthetic_ratio(double ratio) {
  if (ratio < 0.0) throw ArgumentError("compose_training_set: ratio must be >= 0");
}

}  // namespace detail

}  // namespace vrsketch
