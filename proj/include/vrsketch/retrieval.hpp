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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vrsketch/dataset.hpp"
#include "vrsketch/encoder.hpp"

namespace vrsketch {

// Embedded gallery: one unit-norm column per shape, fingerprinted by the
// producing model's parameters.
struct GalleryIndex {
  std::vector<std::string> shape_ids;
  Eigen::MatrixXd embeddings;  // d x |gallery|
  std::uint64_t fingerprint = 0;
};

// Embeds every gallery shape once through the shape branch.
GalleryIndex build_gallery(const CrossModalModel& model,
                           const std::vector<std::pair<std::string, PointCloud>>& shapes);

// Binary index file: header (d, count, fingerprint), row-major float32
// matrix, id list.
void save_gallery_index(const GalleryIndex& index, const std::filesystem::path& path);

// Reload; when expected_fingerprint is given a mismatch raises a stale-index
// EvaluationError.
GalleryIndex load_gallery_index(const std::filesystem::path& path,
                                std::optional<std::uint64_t> expected_fingerprint = {});

// Ranked gallery identifiers for one query, ascending distance, ties broken
// by shape_id lexicographic order.
struct RetrievalResult {
  std::string query_id;
  std::vector<std::string> shape_ids;
  std::vector<double> distances;
};

// k nearest gallery entries by Euclidean distance (the same ordering as
// cosine on unit-norm embeddings). Exact linear scan.
RetrievalResult retrieve(const GalleryIndex& index, const Eigen::VectorXd& query_embedding,
                         int k, const std::string& query_id = {});

// 100 * |{q : gt(q) in top-k(q)}| / |queries|. A query missing from the
// ground-truth map raises an EvaluationError naming it.
double accuracy_at_k(const std::vector<RetrievalResult>& results,
                     const std::map<std::string, std::string>& ground_truth, int k);

struct AccuracyReport {
  double a1 = 0.0;
  double a5 = 0.0;
  double a10 = 0.0;
};

AccuracyReport accuracy_summary(const std::vector<RetrievalResult>& results,
                                const std::map<std::string, std::string>& ground_truth);

// One row per cohort: full test set, unseen participants, group A without
// the unseen cohort, group B. Cohorts without queries carry empty metrics.
struct GroupReportRow {
  std::string label;
  int n_queries = 0;
  std::optional<AccuracyReport> metrics;
};

std::vector<GroupReportRow> per_group_report(const std::vector<RetrievalResult>& results,
                                             const DatasetSnapshot& snapshot,
                                             const std::map<std::string, std::string>& gt);

// Percentages with one decimal place; empty cohorts marked "-".
std::string format_group_report(const std::vector<GroupReportRow>& rows);
void save_group_report_csv(const std::vector<GroupReportRow>& rows,
                           const std::filesystem::path& path);

}  // namespace vrsketch
