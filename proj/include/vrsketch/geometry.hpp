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
#include <array>
#include <cstdint>
#include <vector>

#include "vrsketch/rng.hpp"

namespace vrsketch {

// Bumped whenever a sampling algorithm changes; part of the prepare-cache key.
inline constexpr int kSamplerVersion = 1;

// Fixed-size set of 3D points, one point per column. The shared representation
// for sketches and shapes once sampled.
struct PointCloud {
  Eigen::Matrix3Xd points;
  // Set by normalize_cloud: bounding-box center at the origin and the largest
  // axis extent equal to 1.
  bool normalized = false;

  Eigen::Index n_points() const { return points.cols(); }
};

struct Stroke {
  // Columns are (x, y, z); timestamps run parallel to the columns.
  Eigen::Matrix3Xd points;
  std::vector<double> timestamps;
  double width = 1.0;
};

// Raw ingestion form of a VR sketch: ordered, timestamped, width-annotated
// polylines in free space.
struct Sketch {
  std::vector<Stroke> strokes;
};

struct ShapeMesh {
  Eigen::Matrix3Xd vertices;
  std::vector<std::array<int, 3>> faces;
};

// Verifies the `normalized` invariant: per-axis bounding-box midpoints within
// tol of 0 and the maximum axis extent within tol of 1.
bool satisfies_normalized_invariant(const PointCloud& cloud, double tol = 1e-6);

// Centers the axis-aligned bounding box at the origin and applies one
// isotropic scale so the maximum axis extent becomes 1. Throws
// DegenerateInputError when every point coincides.
PointCloud normalize_cloud(const PointCloud& cloud);

// Greedy max-min subset selection. The first point is the one farthest from
// the cloud centroid, each next point maximizes the minimum distance to the
// already-selected set. Ties resolve by lexicographic coordinate order, so the
// selected point set does not depend on the input point order.
std::vector<int> farthest_point_sample(const PointCloud& cloud, int k);

// Same selection over arbitrary-dimension column vectors (used per encoder
// level on intermediate point sets).
std::vector<int> farthest_point_sample_columns(const Eigen::MatrixXd& columns, int k);

// Row i holds the k nearest neighbors of point i (self excluded), nearest
// first. Equal distances resolve by lexicographic coordinate order, then by
// index. Requires k < N.
std::vector<std::vector<int>> knn_indices(const PointCloud& cloud, int k);

// kNN over arbitrary-dimension columns, same contract and tie-breaks. The
// dynamic-graph encoder calls this on intermediate feature spaces.
std::vector<std::vector<int>> knn_columns(const Eigen::MatrixXd& columns, int k);

// Nearest points within `radius` of columns(:, center_index), the center
// itself included, nearest first, capped at k and padded by repeating the
// nearest entry when fewer qualify. Never empty.
std::vector<int> radius_neighbors(const Eigen::Matrix3Xd& columns, int center_index,
                                  double radius, int k);

// Largest-remainder allocation of `target` resample points over strokes,
// proportional to arc length, at least 2 per stroke.
std::vector<int> allocate_stroke_counts(const std::vector<double>& lengths, int target);

// Uniform arc-length resampling of one polyline to exactly m >= 2 points,
// endpoints included.
Eigen::Matrix3Xd resample_polyline(const Eigen::Matrix3Xd& points, int m);

// Resamples every stroke uniformly by arc length (counts proportional to
// stroke length, total >= n), reduces to exactly n points with
// farthest_point_sample, then normalizes. Zero-length strokes are dropped
// with a warning.
PointCloud sample_sketch_cloud(const Sketch& sketch, int n);

// Area-weighted uniform surface sampling of 4n seeded candidates, reduced to
// n points with farthest_point_sample, then normalized.
PointCloud sample_mesh_cloud(const ShapeMesh& mesh, int n, Rng& rng);

// Rotation helpers. Euler angles are in degrees; the combined fix applies
// R = Rz * Ry * Rx to every point.
Eigen::Matrix3d rotation_about_axis(int axis, double radians);
Eigen::Matrix3d euler_xyz_rotation(double rx_deg, double ry_deg, double rz_deg);
PointCloud rotate_cloud(const PointCloud& cloud, const Eigen::Matrix3d& rotation);
Sketch rotate_sketch(const Sketch& sketch, const Eigen::Matrix3d& rotation);

// Lexicographic (x, y, z, ...) comparison of two columns: -1, 0 or +1.
int lex_compare_columns(const Eigen::MatrixXd& m, int a, int b);

}  // namespace vrsketch
