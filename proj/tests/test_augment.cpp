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

#include <doctest.h>

#include <cmath>
#include <set>

#include "vrsketch/augment.hpp"
#include "vrsketch/errors.hpp"
#include "vrsketch/log.hpp"

using namespace vrsketch;

namespace {

PointCloud normalized_cube() {
  PointCloud cloud;
  cloud.points.resize(3, 8);
  int c = 0;
  for (double x : {-0.5, 0.5}) {
    for (double y : {-0.5, 0.5}) {
      for (double z : {-0.5, 0.5}) {
        cloud.points.col(c++) = Eigen::Vector3d(x, y, z);
      }
    }
  }
  cloud.normalized = true;
  return cloud;
}

PointCloud random_normalized(int n, Rng& rng) {
  PointCloud cloud;
  cloud.points.resize(3, n);
  for (int i = 0; i < n; ++i) {
    cloud.points.col(i) =
        Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  }
  return normalize_cloud(cloud);
}

Eigen::MatrixXd pairwise_distances(const PointCloud& cloud) {
  const auto n = cloud.n_points();
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      d(i, j) = (cloud.points.col(i) - cloud.points.col(j)).norm();
    }
  }
  return d;
}

std::vector<std::string> fake_records(const std::string& prefix, int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

TEST_CASE("zero rotation is the identity") {
  PointCloud cloud = normalized_cube();
  PointCloud out = axis_rotation(cloud, 2, 0.0, /*renormalize_after=*/false);
  CHECK(out.points.isApprox(cloud.points, 1e-15));
}

TEST_CASE("90 degree z rotation maps x to y") {
  PointCloud cloud;
  cloud.points.resize(3, 2);
  cloud.points.col(0) = Eigen::Vector3d(1, 0, 0);
  cloud.points.col(1) = Eigen::Vector3d(0, 0, 1);
  PointCloud out = axis_rotation(cloud, 2, M_PI / 2, false);
  CHECK(out.points.col(0).isApprox(Eigen::Vector3d(0, 1, 0), 1e-12));
  CHECK(out.points.col(1).isApprox(Eigen::Vector3d(0, 0, 1), 1e-12));
}

TEST_CASE("random rotation preserves pairwise distances before re-normalization") {
  Rng rng(15);
  AugmentConfig config;
  config.rotation_enabled = true;
  config.renormalize_after = false;
  for (int trial = 0; trial < 10; ++trial) {
    PointCloud cloud = random_normalized(20, rng);
    Eigen::MatrixXd before = pairwise_distances(cloud);
    PointCloud rotated = random_axis_rotation(cloud, config, rng);
    Eigen::MatrixXd after = pairwise_distances(rotated);
    CHECK((before - after).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("rotation re-normalizes by default") {
  Rng rng(16);
  AugmentConfig config;
  PointCloud cloud = random_normalized(24, rng);
  PointCloud out = random_axis_rotation(cloud, config, rng);
  CHECK(satisfies_normalized_invariant(out));
}

TEST_CASE("identity scale factors leave the cloud unchanged") {
  PointCloud cloud = normalized_cube();
  PointCloud out = anisotropic_scale(cloud, Eigen::Vector3d(1, 1, 1), false);
  CHECK(out.points.isApprox(cloud.points, 1e-15));
}

TEST_CASE("scale factors stretch the cube extents accordingly") {
  PointCloud cloud = normalized_cube();
  PointCloud out = anisotropic_scale(cloud, Eigen::Vector3d(0.9, 1.0, 1.1), false);
  Eigen::Vector3d extent = out.points.rowwise().maxCoeff() - out.points.rowwise().minCoeff();
  CHECK(extent.x() == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(extent.y() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(extent.z() == doctest::Approx(1.1).epsilon(1e-12));
}

TEST_CASE("random scales stay inside the configured bounds over many seeds") {
  AugmentConfig config;
  config.scale_enabled = true;
  config.renormalize_after = false;
  PointCloud cloud = normalized_cube();
  Eigen::Vector3d base = cloud.points.rowwise().maxCoeff() - cloud.points.rowwise().minCoeff();
  for (int seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    PointCloud out = random_anisotropic_scale(cloud, config, rng);
    Eigen::Vector3d extent = out.points.rowwise().maxCoeff() - out.points.rowwise().minCoeff();
    for (int a = 0; a < 3; ++a) {
      CHECK(extent(a) >= 0.9 * base(a) - 1e-12);
      CHECK(extent(a) <= 1.1 * base(a) + 1e-12);
    }
    // No coordinate moves by more than 10% of its magnitude.
    CHECK(((out.points - cloud.points).cwiseAbs().array() <=
           cloud.points.cwiseAbs().array() * 0.1 + 1e-12)
              .all());
  }
}

TEST_CASE("anisotropy survives isotropic re-normalization") {
  PointCloud cloud = normalized_cube();
  PointCloud out = anisotropic_scale(cloud, Eigen::Vector3d(0.9, 1.0, 1.1), true);
  CHECK(satisfies_normalized_invariant(out));
  Eigen::Vector3d extent = out.points.rowwise().maxCoeff() - out.points.rowwise().minCoeff();
  // Proportions 0.9 : 1.0 : 1.1 rescaled so the max extent is 1.
  CHECK(extent.x() == doctest::Approx(0.9 / 1.1).epsilon(1e-9));
  CHECK(extent.y() == doctest::Approx(1.0 / 1.1).epsilon(1e-9));
  CHECK(extent.z() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("invalid augment configs are rejected") {
  AugmentConfig config;
  config.scale_lo = 0.0;
  CHECK_THROWS_AS(config.validate(), ArgumentError);
  config = AugmentConfig{};
  config.scale_lo = 1.2;
  config.scale_hi = 1.1;
  CHECK_THROWS_AS(config.validate(), ArgumentError);
  config = AugmentConfig{};
  config.synthetic_ratio = -0.5;
  CHECK_THROWS_AS(config.validate(), ArgumentError);
}

TEST_CASE("compose with ratio 0 returns the human records only") {
  Rng rng(1);
  auto human = fake_records("h", 10);
  auto synth = fake_records("s", 10);
  auto out = compose_training_set(human, synth, 0.0, rng);
  CHECK(out == human);
}

TEST_CASE("compose reproduces the 281 + 421 composition at ratio 1.5") {
  Rng rng(2);
  auto human = fake_records("h", 281);
  auto synth = fake_records("s", 702);
  auto out = compose_training_set(human, synth, 1.5, rng);
  CHECK(out.size() == 281 + 421);
  std::set<std::string> unique(out.begin(), out.end());
  CHECK(unique.size() == out.size());  // no synthetic record repeats
}

TEST_CASE("compose caps at the synthetic pool size") {
  Rng rng(3);
  auto human = fake_records("h", 50);
  auto synth = fake_records("s", 10);
  WarningCapture capture;
  auto out = compose_training_set(human, synth, 100.0, rng);
  CHECK(out.size() == 60);
  CHECK(capture.contains("exceeds 2.0"));
}

TEST_CASE("compose is deterministic given the seed") {
  auto human = fake_records("h", 20);
  auto synth = fake_records("s", 40);
  Rng rng_a(99);
  Rng rng_b(99);
  auto a = compose_training_set(human, synth, 1.2, rng_a);
  auto b = compose_training_set(human, synth, 1.2, rng_b);
  CHECK(a == b);
  Rng rng_c(100);
  auto c = compose_training_set(human, synth, 1.2, rng_c);
  CHECK(a != c);  // a different seed draws a different subset
}

TEST_CASE("warning is emitted only above ratio 2.0") {
  auto human = fake_records("h", 4);
  auto synth = fake_records("s", 40);
  {
    WarningCapture capture;
    Rng rng(1);
    compose_training_set(human, synth, 2.0, rng);
    CHECK(capture.warnings().empty());
  }
  {
    WarningCapture capture;
    Rng rng(1);
    compose_training_set(human, synth, 2.3, rng);
    CHECK(capture.contains("degrades"));
  }
}
