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
#include <string>
#include <vector>

#include "vrsketch/geometry.hpp"
#include "vrsketch/rng.hpp"
#include "vrsketch/trainer.hpp"

namespace vrsketch::testing {

// Procedural stand-in dataset: each variant is a distinct two-lobe ellipsoid
// surface; the "sketch" is an independent sparser sample of the same surface
// with a little jitter, so matched pairs are geometrically close while
// variants stay distinguishable.
inline PointCloud toy_surface_cloud(int variant, int n_points, Rng& rng, double jitter) {
  auto fract = [](double x) { return x - std::floor(x); };
  const double a = 0.25 + 0.75 * fract(variant * 0.618034);
  const double b = 0.25 + 0.75 * fract(variant * 0.414214 + 0.31);
  const double c = 0.25 + 0.75 * fract(variant * 0.732051 + 0.57);
  const double lobe = 0.3 + 0.6 * fract(variant * 0.292893 + 0.11);
  const bool two_lobes = variant % 2 == 0;

  PointCloud cloud;
  cloud.points.resize(3, n_points);
  for (int i = 0; i < n_points; ++i) {
    Eigen::Vector3d dir(rng.normal(), rng.normal(), rng.normal());
    dir.normalize();
    Eigen::Vector3d p(a * dir.x(), b * dir.y(), c * dir.z());
    if (two_lobes && i % 2 == 0) p.x() += lobe;
    if (jitter > 0.0) {
      p += jitter * Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    }
    cloud.points.col(i) = p;
  }
  return normalize_cloud(cloud);
}

inline std::vector<TrainingPair> make_toy_pairs(int count, int n_points, std::uint64_t seed) {
  std::vector<TrainingPair> pairs;
  for (int i = 0; i < count; ++i) {
    TrainingPair pair;
    pair.pair_id = "pair_" + std::to_string(i);
    pair.shape_id = "shape_" + std::to_string(i);
    Rng shape_rng(combine_seed(seed, fnv1a64(pair.shape_id)));
    Rng sketch_rng(combine_seed(seed, fnv1a64(pair.pair_id + ":sketch")));
    pair.shape = toy_surface_cloud(i, n_points, shape_rng, 0.0);
    pair.sketch = toy_surface_cloud(i, n_points, sketch_rng, 0.02);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace vrsketch::testing
