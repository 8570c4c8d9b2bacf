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

#include "vrsketch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vrsketch/errors.hpp"
#include "vrsketch/log.hpp"

namespace vrsketch {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Candidate ordering shared by FPS, kNN and radius queries: ascending key,
// equal keys resolved by lexicographically smaller column, then lower index.
struct RankedIndex {
  double key;
  int index;
};

bool ranked_less(const Eigen::MatrixXd& columns, const RankedIndex& a, const RankedIndex& b) {
  if (a.key != b.key) return a.key < b.key;
  int c = lex_compare_columns(columns, a.index, b.index);
  if (c != 0) return c < 0;
  return a.index < b.index;
}

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw ArgumentError(std::string(what) + ": non-finite coordinates");
}

}  // namespace

int lex_compare_columns(const Eigen::MatrixXd& m, int a, int b) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (m(r, a) < m(r, b)) return -1;
    if (m(r, a) > m(r, b)) return 1;
  }
  return 0;
}

bool satisfies_normalized_invariant(const PointCloud& cloud, double tol) {
  if (cloud.n_points() < 1) return false;
  Eigen::Vector3d lo = cloud.points.rowwise().minCoeff();
  Eigen::Vector3d hi = cloud.points.rowwise().maxCoeff();
  Eigen::Vector3d mid = 0.5 * (lo + hi);
  double max_extent = (hi - lo).maxCoeff();
  return mid.cwiseAbs().maxCoeff() <= tol && std::abs(max_extent - 1.0) <= tol;
}

PointCloud normalize_cloud(const PointCloud& cloud) {
  if (cloud.n_points() < 1) throw ArgumentError("normalize_cloud: empty cloud");
  check_finite(cloud.points, "normalize_cloud");

  Eigen::Vector3d lo = cloud.points.rowwise().minCoeff();
  Eigen::Vector3d hi = cloud.points.rowwise().maxCoeff();
  Eigen::Vector3d mid = 0.5 * (lo + hi);
  double max_extent = (hi - lo).maxCoeff();
  if (max_extent <= 0.0) {
    throw DegenerateInputError("normalize_cloud: all points coincident, zero extent");
  }

  PointCloud out;
  out.points = (cloud.points.colwise() - mid) / max_extent;
  out.normalized = true;
  return out;
}

std::vector<int> farthest_point_sample_columns(const Eigen::MatrixXd& columns, int k) {
  const int n = static_cast<int>(columns.cols());
  if (k < 1 || k > n) throw ArgumentError("farthest_point_sample: k out of range");

  Eigen::VectorXd centroid = columns.rowwise().mean();
  std::vector<int> selected;
  selected.reserve(k);

  // Larger key wins; equal keys go to the lexicographically smaller column,
  // then the lower index. Used for the seed and every greedy round.
  auto improves = [&columns](const RankedIndex& cand, const RankedIndex& best) {
    if (best.index < 0) return true;
    if (cand.key != best.key) return cand.key > best.key;
    int c = lex_compare_columns(columns, cand.index, best.index);
    if (c != 0) return c < 0;
    return cand.index < best.index;
  };

  // Seed: farthest from the centroid.
  RankedIndex best{-1.0, -1};
  for (int i = 0; i < n; ++i) {
    RankedIndex cand{(columns.col(i) - centroid).squaredNorm(), i};
    if (improves(cand, best)) best = cand;
  }
  selected.push_back(best.index);

  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  int last = best.index;
  for (int round = 1; round < k; ++round) {
    for (int i = 0; i < n; ++i) {
      double d = (columns.col(i) - columns.col(last)).squaredNorm();
      if (d < min_dist[i]) min_dist[i] = d;
    }
    min_dist[last] = -1.0;  // already selected

    RankedIndex far{-1.0, -1};
    for (int i = 0; i < n; ++i) {
      if (min_dist[i] < 0.0) continue;
      RankedIndex cand{min_dist[i], i};
      if (improves(cand, far)) far = cand;
    }
    selected.push_back(far.index);
    last = far.index;
  }
  return selected;
}

std::vector<int> farthest_point_sample(const PointCloud& cloud, int k) {
  check_finite(cloud.points, "farthest_point_sample");
  return farthest_point_sample_columns(cloud.points, k);
}

std::vector<std::vector<int>> knn_columns(const Eigen::MatrixXd& columns, int k) {
  const int n = static_cast<int>(columns.cols());
  if (k < 1 || k >= n) throw ArgumentError("knn: requires 1 <= k < N");

  // Exact per-pair distances, computed once per unordered pair so the matrix
  // is exactly symmetric and duplicates land at exactly 0.
  Eigen::MatrixXd d2(n, n);
  d2.setZero();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double d = (columns.col(i) - columns.col(j)).squaredNorm();
      d2(i, j) = d;
      d2(j, i) = d;
    }
  }

  std::vector<std::vector<int>> neighbors(n);
  std::vector<RankedIndex> ranked;
  ranked.reserve(n - 1);
  for (int i = 0; i < n; ++i) {
    ranked.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      ranked.push_back({d2(i, j), j});
    }
    auto cmp = [&columns](const RankedIndex& a, const RankedIndex& b) {
      return ranked_less(columns, a, b);
    };
    std::partial_sort(ranked.begin(), ranked.begin() + k, ranked.end(), cmp);
    neighbors[i].reserve(k);
    for (int j = 0; j < k; ++j) neighbors[i].push_back(ranked[j].index);
  }
  return neighbors;
}

std::vector<std::vector<int>> knn_indices(const PointCloud& cloud, int k) {
  check_finite(cloud.points, "knn_indices");
  return knn_columns(cloud.points, k);
}

std::vector<int> radius_neighbors(const Eigen::Matrix3Xd& columns, int center_index,
                                  double radius, int k) {
  const int n = static_cast<int>(columns.cols());
  if (center_index < 0 || center_index >= n) {
    throw ArgumentError("radius_neighbors: center index out of range");
  }
  if (k < 1) throw ArgumentError("radius_neighbors: k must be positive");

  const double r2 = radius * radius;
  std::vector<RankedIndex> in_range;
  for (int j = 0; j < n; ++j) {
    double d = (columns.col(j) - columns.col(center_index)).squaredNorm();
    if (d <= r2) in_range.push_back({d, j});
  }
  // The center is one of the columns, so in_range holds at least itself.
  const Eigen::MatrixXd& generic = columns;
  std::sort(in_range.begin(), in_range.end(),
            [&generic](const RankedIndex& a, const RankedIndex& b) {
              return ranked_less(generic, a, b);
            });

  std::vector<int> out;
  out.reserve(k);
  for (int j = 0; j < k; ++j) {
    out.push_back(j < static_cast<int>(in_range.size()) ? in_range[j].index
                                                        : in_range.front().index);
  }
  return out;
}

std::vector<int> allocate_stroke_counts(const std::vector<double>& lengths, int target) {
  const int s = static_cast<int>(lengths.size());
  if (s == 0) throw ArgumentError("allocate_stroke_counts: no strokes");
  double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
  if (total <= 0.0) throw DegenerateInputError("allocate_stroke_counts: zero total length");

  std::vector<int> counts(s, 2);
  std::vector<std::pair<double, int>> fractions;  // (fraction, stroke) for remainders
  int assigned = 0;
  for (int i = 0; i < s; ++i) {
    double quota = static_cast<double>(target) * lengths[i] / total;
    counts[i] = std::max(2, static_cast<int>(std::floor(quota)));
    assigned += counts[i];
    fractions.push_back({quota - std::floor(quota), i});
  }
  int deficit = target - assigned;
  if (deficit > 0) {
    std::sort(fractions.begin(), fractions.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (int j = 0; deficit > 0; j = (j + 1) % s, --deficit) {
      counts[fractions[j].second] += 1;
    }
  }
  return counts;
}

Eigen::Matrix3Xd resample_polyline(const Eigen::Matrix3Xd& points, int m) {
  const int n = static_cast<int>(points.cols());
  if (n < 2) throw ArgumentError("resample_polyline: need at least 2 points");
  if (m < 2) throw ArgumentError("resample_polyline: need at least 2 samples");

  std::vector<double> cumulative(n, 0.0);
  for (int i = 1; i < n; ++i) {
    cumulative[i] = cumulative[i - 1] + (points.col(i) - points.col(i - 1)).norm();
  }
  const double total = cumulative[n - 1];
  if (total <= 0.0) throw DegenerateInputError("resample_polyline: zero-length polyline");

  Eigen::Matrix3Xd out(3, m);
  int seg = 0;
  for (int j = 0; j < m; ++j) {
    double t = total * static_cast<double>(j) / static_cast<double>(m - 1);
    while (seg < n - 2 && cumulative[seg + 1] < t) ++seg;
    double seg_len = cumulative[seg + 1] - cumulative[seg];
    double alpha = seg_len > 0.0 ? (t - cumulative[seg]) / seg_len : 0.0;
    alpha = std::clamp(alpha, 0.0, 1.0);
    out.col(j) = points.col(seg) + alpha * (points.col(seg + 1) - points.col(seg));
  }
  out.col(m - 1) = points.col(n - 1);  // land exactly on the endpoint
  return out;
}

PointCloud sample_sketch_cloud(const Sketch& sketch, int n) {
  if (sketch.strokes.empty()) throw ArgumentError("sample_sketch_cloud: empty sketch");
  if (n < 1) throw ArgumentError("sample_sketch_cloud: n must be positive");

  std::vector<const Stroke*> live;
  std::vector<double> lengths;
  int dropped = 0;
  for (const Stroke& stroke : sketch.strokes) {
    if (stroke.points.cols() < 2) {
      ++dropped;
      continue;
    }
    double len = 0.0;
    for (Eigen::Index i = 1; i < stroke.points.cols(); ++i) {
      len += (stroke.points.col(i) - stroke.points.col(i - 1)).norm();
    }
    if (len <= 0.0) {
      ++dropped;
      continue;
    }
    live.push_back(&stroke);
    lengths.push_back(len);
  }
  if (dropped > 0) {
    log_warn("sample_sketch_cloud: dropped " + std::to_string(dropped) +
             " degenerate zero-length stroke(s)");
  }
  if (live.empty()) {
    throw DegenerateInputError("sample_sketch_cloud: all strokes degenerate");
  }

  const int target = std::max(n, 2 * static_cast<int>(live.size()));
  std::vector<int> counts = allocate_stroke_counts(lengths, target);

  int total = std::accumulate(counts.begin(), counts.end(), 0);
  Eigen::Matrix3Xd raw(3, total);
  int col = 0;
  for (std::size_t i = 0; i < live.size(); ++i) {
    Eigen::Matrix3Xd r = resample_polyline(live[i]->points, counts[i]);
    raw.middleCols(col, counts[i]) = r;
    col += counts[i];
  }

  PointCloud dense;
  dense.points = raw;
  std::vector<int> keep = farthest_point_sample(dense, n);
  PointCloud reduced;
  reduced.points.resize(3, n);
  for (int i = 0; i < n; ++i) reduced.points.col(i) = raw.col(keep[i]);
  if (n == 1) return reduced;  // a single point has no extent to normalize
  return normalize_cloud(reduced);
}

PointCloud sample_mesh_cloud(const ShapeMesh& mesh, int n, Rng& rng) {
  if (n < 1) throw ArgumentError("sample_mesh_cloud: n must be positive");
  if (mesh.faces.empty()) throw DegenerateInputError("sample_mesh_cloud: no faces");

  const int v = static_cast<int>(mesh.vertices.cols());
  std::vector<double> cumulative_area;
  std::vector<int> face_of;
  double total_area = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    for (int idx : face) {
      if (idx < 0 || idx >= v) throw ArgumentError("sample_mesh_cloud: face index out of range");
    }
    Eigen::Vector3d a = mesh.vertices.col(face[0]);
    Eigen::Vector3d b = mesh.vertices.col(face[1]);
    Eigen::Vector3d c = mesh.vertices.col(face[2]);
    double area = 0.5 * (b - a).cross(c - a).norm();
    if (area > 0.0) {
      total_area += area;
      cumulative_area.push_back(total_area);
      face_of.push_back(static_cast<int>(f));
    }
  }
  if (total_area <= 0.0) {
    throw DegenerateInputError("sample_mesh_cloud: all faces degenerate");
  }

  const int candidates = 4 * n;
  Eigen::Matrix3Xd raw(3, candidates);
  for (int i = 0; i < candidates; ++i) {
    double pick = rng.uniform() * total_area;
    auto it = std::lower_bound(cumulative_area.begin(), cumulative_area.end(), pick);
    int f = face_of[std::min<std::size_t>(it - cumulative_area.begin(),
                                          face_of.size() - 1)];
    const auto& face = mesh.faces[f];
    double u = rng.uniform();
    double w = rng.uniform();
    if (u + w > 1.0) {  // reflect into the triangle
      u = 1.0 - u;
      w = 1.0 - w;
    }
    Eigen::Vector3d a = mesh.vertices.col(face[0]);
    Eigen::Vector3d b = mesh.vertices.col(face[1]);
    Eigen::Vector3d c = mesh.vertices.col(face[2]);
    raw.col(i) = a + u * (b - a) + w * (c - a);
  }

  PointCloud dense;
  dense.points = raw;
  std::vector<int> keep = farthest_point_sample(dense, n);
  PointCloud reduced;
  reduced.points.resize(3, n);
  for (int i = 0; i < n; ++i) reduced.points.col(i) = raw.col(keep[i]);
  if (n == 1) return reduced;  // a single point has no extent to normalize
  return normalize_cloud(reduced);
}

Eigen::Matrix3d rotation_about_axis(int axis, double radians) {
  if (axis < 0 || axis > 2) throw ArgumentError("rotation_about_axis: axis must be 0, 1 or 2");
  double c = std::cos(radians);
  double s = std::sin(radians);
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  int u = (axis + 1) % 3;
  int w = (axis + 2) % 3;
  r(u, u) = c;
  r(u, w) = -s;
  r(w, u) = s;
  r(w, w) = c;
  return r;
}

Eigen::Matrix3d euler_xyz_rotation(double rx_deg, double ry_deg, double rz_deg) {
  const double to_rad = kPi / 180.0;
  return rotation_about_axis(2, rz_deg * to_rad) * rotation_about_axis(1, ry_deg * to_rad) *
         rotation_about_axis(0, rx_deg * to_rad);
}

PointCloud rotate_cloud(const PointCloud& cloud, const Eigen::Matrix3d& rotation) {
  PointCloud out;
  out.points = rotation * cloud.points;
  out.normalized = false;
  return out;
}

Sketch rotate_sketch(const Sketch& sketch, const Eigen::Matrix3d& rotation) {
  Sketch out = sketch;
  for (Stroke& stroke : out.strokes) stroke.points = rotation * stroke.points;
  return out;
}

}  // namespace vrsketch
