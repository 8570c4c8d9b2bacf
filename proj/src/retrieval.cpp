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

#include "vrsketch/retrieval.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "vrsketch/checkpoint.hpp"
#include "vrsketch/errors.hpp"

namespace vrsketch {

namespace {

constexpr char kIndexMagic[8] = {'V', 'R', 'S', 'K', 'I', 'D', 'X', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

GalleryIndex build_gallery(const CrossModalModel& model,
                           const std::vector<std::pair<std::string, PointCloud>>& shapes) {
  if (shapes.empty()) throw ArgumentError("build_gallery: no shapes");
  std::set<std::string> ids;
  for (const auto& [id, cloud] : shapes) {
    if (!ids.insert(id).second) throw ArgumentError("build_gallery: duplicate shape id " + id);
  }

  GalleryIndex index;
  index.fingerprint = model_fingerprint(model);
  index.shape_ids.reserve(shapes.size());
  index.embeddings.resize(model.config().embedding_dim,
                          static_cast<Eigen::Index>(shapes.size()));
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    index.shape_ids.push_back(shapes[i].first);
    index.embeddings.col(static_cast<Eigen::Index>(i)) =
        model.encode(shapes[i].second, Modality::kShape);
  }
  return index;
}

void save_gallery_index(const GalleryIndex& index, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EvaluationError("cannot write gallery index: " + path.string());

  const auto d = static_cast<std::uint64_t>(index.embeddings.rows());
  const auto count = static_cast<std::uint64_t>(index.embeddings.cols());
  out.write(kIndexMagic, 8);
  write_u64(out, d);
  write_u64(out, count);
  write_u64(out, index.fingerprint);
  // Row-major float32: one gallery row per embedding.
  for (std::uint64_t i = 0; i < count; ++i) {
    for (std::uint64_t j = 0; j < d; ++j) {
      auto v = static_cast<float>(index.embeddings(static_cast<Eigen::Index>(j),
                                                   static_cast<Eigen::Index>(i)));
      out.write(reinterpret_cast<const char*>(&v), sizeof(float));
    }
  }
  for (const auto& id : index.shape_ids) {
    write_u64(out, id.size());
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
  if (!out) throw EvaluationError("failed writing gallery index: " + path.string());
}

GalleryIndex load_gallery_index(const std::filesystem::path& path,
                                std::optional<std::uint64_t> expected_fingerprint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EvaluationError("gallery index not found: " + path.string());

  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kIndexMagic, 8) != 0) {
    throw EvaluationError("not a gallery index file: " + path.string());
  }
  const std::uint64_t d = read_u64(in);
  const std::uint64_t count = read_u64(in);
  GalleryIndex index;
  index.fingerprint = read_u64(in);
  if (expected_fingerprint && index.fingerprint != *expected_fingerprint) {
    throw EvaluationError("stale gallery index: " + path.string() +
                          " was produced by a different checkpoint");
  }

  index.embeddings.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(count));
  for (std::uint64_t i = 0; i < count; ++i) {
    for (std::uint64_t j = 0; j < d; ++j) {
      float v = 0.0f;
      in.read(reinterpret_cast<char*>(&v), sizeof(float));
      index.embeddings(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  index.shape_ids.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t len = read_u64(in);
    std::string id(len, '\0');
    in.read(id.data(), static_cast<std::streamsize>(len));
    index.shape_ids.push_back(std::move(id));
  }
  if (!in) throw EvaluationError("truncated gallery index: " + path.string());
  return index;
}

RetrievalResult retrieve(const GalleryIndex& index, const Eigen::VectorXd& query_embedding,
                         int k, const std::string& query_id) {
  const auto gallery_size = static_cast<int>(index.embeddings.cols());
  if (k < 1 || k > gallery_size) {
    throw ArgumentError("retrieve: k=" + std::to_string(k) + " outside [1, " +
                        std::to_string(gallery_size) + "]");
  }
  if (query_embedding.size() != index.embeddings.rows()) {
    throw ArgumentError("retrieve: query dimension mismatch");
  }

  std::vector<int> order(gallery_size);
  std::vector<double> dist(gallery_size);
  for (int i = 0; i < gallery_size; ++i) {
    order[i] = i;
    dist[i] = (index.embeddings.col(i) - query_embedding).norm();
  }
  auto cmp = [&](int a, int b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return index.shape_ids[a] < index.shape_ids[b];
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), cmp);

  RetrievalResult result;
  result.query_id = query_id;
  result.shape_ids.reserve(k);
  result.distances.reserve(k);
  for (int i = 0; i < k; ++i) {
    result.shape_ids.push_back(index.shape_ids[order[i]]);
    result.distances.push_back(dist[order[i]]);
  }
  return result;
}

double accuracy_at_k(const std::vector<RetrievalResult>& results,
                     const std::map<std::string, std::string>& ground_truth, int k) {
  if (results.empty()) throw ArgumentError("accuracy_at_k: no queries");
  if (k < 1) throw ArgumentError("accuracy_at_k: k must be positive");

  int hits = 0;
  for (const auto& r : results) {
    auto it = ground_truth.find(r.query_id);
    if (it == ground_truth.end()) {
      throw EvaluationError("accuracy_at_k: missing ground truth for query '" + r.query_id + "'");
    }
    const auto top = static_cast<std::size_t>(std::min<std::size_t>(k, r.shape_ids.size()));
    for (std::size_t i = 0; i < top; ++i) {
      if (r.shape_ids[i] == it->second) {
        ++hits;
        break;
      }
    }
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(results.size());
}

AccuracyReport accuracy_summary(const std::vector<RetrievalResult>& results,
                                const std::map<std::string, std::string>& ground_truth) {
  AccuracyReport report;
  report.a1 = accuracy_at_k(results, ground_truth, 1);
  report.a5 = accuracy_at_k(results, ground_truth, 5);
  report.a10 = accuracy_at_k(results, ground_truth, 10);
  return report;
}

std::vector<GroupReportRow> per_group_report(const std::vector<RetrievalResult>& results,
                                             const DatasetSnapshot& snapshot,
                                             const std::map<std::string, std::string>& gt) {
  std::map<std::string, const ManifestRecord*> by_pair;
  for (const auto& r : snapshot.records) by_pair[r.pair_id] = &r;

  std::vector<std::string> unseen = unseen_participants(snapshot);
  std::set<std::string> unseen_set(unseen.begin(), unseen.end());

  std::vector<RetrievalResult> full, cohort_unseen, group_a_rest, group_b;
  for (const auto& r : results) {
    auto it = by_pair.find(r.query_id);
    if (it == by_pair.end()) {
      throw EvaluationError("per_group_report: query '" + r.query_id + "' not in the manifest");
    }
    const ManifestRecord& rec = *it->second;
    full.push_back(r);
    if (unseen_set.count(rec.participant_id)) {
      cohort_unseen.push_back(r);
    } else if (rec.group == ParticipantGroup::kA) {
      group_a_rest.push_back(r);
    }
    if (rec.group == ParticipantGroup::kB) group_b.push_back(r);
  }

  auto make_row = [&gt](std::string label, const std::vector<RetrievalResult>& subset) {
    GroupReportRow row;
    row.label = std::move(label);
    row.n_queries = static_cast<int>(subset.size());
    if (!subset.empty()) row.metrics = accuracy_summary(subset, gt);
    return row;
  };

  return {make_row("full_test", full), make_row("unseen_participants", cohort_unseen),
          make_row("group_A_minus_unseen", group_a_rest), make_row("group_B", group_b)};
}

namespace {

std::string format_metric(const std::optional<AccuracyReport>& m,
                          double AccuracyReport::*field) {
  if (!m) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << (*m).*field;
  return os.str();
}

}  // namespace

std::string format_group_report(const std::vector<GroupReportRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(24) << "cohort" << std::right << std::setw(10) << "queries"
     << std::setw(8) << "A@1" << std::setw(8) << "A@5" << std::setw(8) << "A@10" << "\n";
  for (const auto& row : rows) {
    os << std::left << std::setw(24) << row.label << std::right << std::setw(10)
       << row.n_queries << std::setw(8) << format_metric(row.metrics, &AccuracyReport::a1)
       << std::setw(8) << format_metric(row.metrics, &AccuracyReport::a5) << std::setw(8)
       << format_metric(row.metrics, &AccuracyReport::a10) << "\n";
  }
  return os.str();
}

void save_group_report_csv(const std::vector<GroupReportRow>& rows,
                           const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw EvaluationError("cannot write report: " + path.string());
  out << "cohort,queries,A@1,A@5,A@10\n";
  for (const auto& row : rows) {
    out << row.label << "," << row.n_queries << ","
        << format_metric(row.metrics, &AccuracyReport::a1) << ","
        << format_metric(row.metrics, &AccuracyReport::a5) << ","
        << format_metric(row.metrics, &AccuracyReport::a10) << "\n";
  }
}

}  // namespace vrsketch
