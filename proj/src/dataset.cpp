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

#include "vrsketch/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "vrsketch/errors.hpp"
#include "vrsketch/io.hpp"
#include "vrsketch/log.hpp"
#include "vrsketch/rng.hpp"

namespace vrsketch {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ls(line);
  while (std::getline(ls, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_bool_field(const std::string& s, bool* out) {
  if (s == "0" || s == "false") {
    *out = false;
    return true;
  }
  if (s == "1" || s == "true") {
    *out = true;
    return true;
  }
  return false;
}

std::string shape_id_from_path(const std::filesystem::path& p) { return p.stem().string(); }

std::vector<std::string> build_gallery_ids(const std::vector<ManifestRecord>& records,
                                           std::vector<std::string>* violations) {
  std::set<std::string> gallery;
  std::set<std::string> trained;
  for (const auto& r : records) {
    if (r.split == Split::kTest || r.split == Split::kGalleryOnly) {
      gallery.insert(r.shape_id);
    } else {
      trained.insert(r.shape_id);
    }
  }
  if (violations) {
    for (const auto& id : gallery) {
      if (trained.count(id)) {
        violations->push_back("shape '" + id + "' appears both in the gallery and in train/val");
      }
    }
  }
  return {gallery.begin(), gallery.end()};
}

}  // namespace

Split parse_split(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  if (name == "gallery_only") return Split::kGalleryOnly;
  throw ArgumentError("unknown split: " + name);
}

std::string split_name(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
    case Split::kGalleryOnly:
      return "gallery_only";
  }
  return "train";
}

std::vector<ManifestRecord> DatasetSnapshot::records_in(Split split) const {
  std::vector<ManifestRecord> out;
  for (const auto& r : records) {
    if (r.split == split) out.push_back(r);
  }
  return out;
}

DatasetSnapshot load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open manifest: " + path.string());
  const std::filesystem::path base = path.has_parent_path()
                                         ? path.parent_path()
                                         : std::filesystem::path(".");

  std::string header;
  if (!std::getline(in, header)) throw LoadError(path.string() + ": empty manifest");
  if (trim(header) != kManifestHeader) {
    throw LoadError(path.string() + ": bad header, expected '" + kManifestHeader + "'");
  }

  std::vector<ManifestRecord> records;
  std::vector<std::string> errors;
  std::set<std::string> seen_ids;
  std::string line;
  int row = 1;

  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    auto fail = [&errors, row](const std::string& what) {
      errors.push_back("row " + std::to_string(row) + ": " + what);
    };
    if (fields.size() != 10) {
      fail("expected 10 fields, got " + std::to_string(fields.size()));
      continue;
    }
    for (auto& f : fields) f = trim(f);

    ManifestRecord r;
    r.pair_id = fields[0];
    r.participant_id = fields[1];
    if (r.pair_id.empty()) {
      fail("empty pair_id");
      continue;
    }
    if (!seen_ids.insert(r.pair_id).second) {
      fail("duplicate pair_id '" + r.pair_id + "'");
      continue;
    }

    if (fields[2] == "A") {
      r.group = ParticipantGroup::kA;
    } else if (fields[2] == "B") {
      r.group = ParticipantGroup::kB;
    } else {
      fail("group must be A or B, got '" + fields[2] + "'");
      continue;
    }

    try {
      r.split = parse_split(fields[3]);
    } catch (const ArgumentError& e) {
      fail(e.what());
      continue;
    }

    if (!fields[4].empty()) r.sketch_path = base / fields[4];
    if (!fields[5].empty()) r.shape_path = base / fields[5];

    if (!parse_bool_field(fields[6], &r.is_synthetic)) {
      fail("is_synthetic must be 0/1/true/false, got '" + fields[6] + "'");
      continue;
    }
    if (r.is_synthetic && (r.split == Split::kVal || r.split == Split::kTest)) {
      fail("synthetic record '" + r.pair_id + "' cannot enter the " + split_name(r.split) +
           " split");
      continue;
    }

    const bool has_fix = !fields[7].empty() || !fields[8].empty() || !fields[9].empty();
    if (has_fix) {
      try {
        double rx = fields[7].empty() ? 0.0 : std::stod(fields[7]);
        double ry = fields[8].empty() ? 0.0 : std::stod(fields[8]);
        double rz = fields[9].empty() ? 0.0 : std::stod(fields[9]);
        r.alignment_fix = Eigen::Vector3d(rx, ry, rz);
      } catch (...) {
        fail("bad alignment angles");
        continue;
      }
    }

    if (r.split == Split::kGalleryOnly) {
      if (r.shape_path.empty()) {
        fail("gallery_only record '" + r.pair_id + "' needs a shape path");
        continue;
      }
    } else if (r.sketch_path.empty() || r.shape_path.empty()) {
      fail("record '" + r.pair_id + "' needs both sketch and shape paths");
      continue;
    }
    bool missing = false;
    if (!r.sketch_path.empty() && !std::filesystem::exists(r.sketch_path)) {
      fail("sketch path not found: " + r.sketch_path.string());
      missing = true;
    }
    if (!r.shape_path.empty() && !std::filesystem::exists(r.shape_path)) {
      fail("shape path not found: " + r.shape_path.string());
      missing = true;
    }
    if (missing) continue;

    r.shape_id = shape_id_from_path(r.shape_path);
    records.push_back(std::move(r));
  }

  DatasetSnapshot snapshot;
  snapshot.records = std::move(records);
  snapshot.gallery_ids = build_gallery_ids(snapshot.records, &errors);

  if (!errors.empty()) {
    std::string joined = path.string() + ": manifest validation failed:";
    for (const auto& e : errors) joined += "\n  " + e;
    throw LoadError(joined);
  }
  return snapshot;
}

void save_manifest(const DatasetSnapshot& snapshot, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write manifest: " + path.string());
  const std::filesystem::path base = path.has_parent_path()
                                         ? path.parent_path()
                                         : std::filesystem::path(".");
  out << kManifestHeader << "\n";
  for (const auto& r : snapshot.records) {
    auto rel = [&base](const std::filesystem::path& p) {
      if (p.empty()) return std::string();
      std::error_code ec;
      auto relative = std::filesystem::relative(p, base, ec);
      return ec ? p.string() : relative.string();
    };
    out << r.pair_id << "," << r.participant_id << ","
        << (r.group == ParticipantGroup::kA ? "A" : "B") << "," << split_name(r.split) << ","
        << rel(r.sketch_path) << "," << rel(r.shape_path) << "," << (r.is_synthetic ? 1 : 0)
        << ",";
    if (r.alignment_fix) {
      out << r.alignment_fix->x() << "," << r.alignment_fix->y() << "," << r.alignment_fix->z();
    } else {
      out << ",,";
    }
    out << "\n";
  }
}

DatasetSnapshot make_splits(const std::vector<ManifestRecord>& records,
                            const std::vector<std::string>& heldout_participants,
                            std::array<int, 3> ratios, std::uint64_t seed) {
  for (int r : ratios) {
    if (r <= 0) throw ArgumentError("make_splits: ratios must be positive");
  }

  std::set<std::string> participants;
  for (const auto& r : records) {
    if (r.split != Split::kGalleryOnly) participants.insert(r.participant_id);
  }
  std::set<std::string> heldout(heldout_participants.begin(), heldout_participants.end());
  for (const auto& p : heldout) {
    if (!participants.count(p)) {
      throw ArgumentError("make_splits: held-out participant '" + p + "' has no records");
    }
  }

  // Only sketches of uniquely-sketched shapes are split; extra sketches of a
  // shape already covered belong to the style-augmentation pool, not here.
  std::map<std::string, int> shape_count;
  for (const auto& r : records) {
    if (r.split != Split::kGalleryOnly) ++shape_count[r.shape_id];
  }

  DatasetSnapshot snapshot;
  std::map<std::string, std::vector<ManifestRecord>> by_participant;
  int dropped = 0;
  for (const auto& r : records) {
    if (r.split == Split::kGalleryOnly) {
      snapshot.records.push_back(r);
      continue;
    }
    if (shape_count[r.shape_id] > 1) {
      ++dropped;
      continue;
    }
    if (heldout.count(r.participant_id)) {
      ManifestRecord t = r;
      t.split = Split::kTest;
      snapshot.records.push_back(std::move(t));
    } else {
      by_participant[r.participant_id].push_back(r);
    }
  }
  if (dropped > 0) {
    log_warn("make_splits: excluded " + std::to_string(dropped) +
             " sketch(es) of non-unique shapes from the splits");
  }

  const double ratio_total = ratios[0] + ratios[1] + ratios[2];
  for (auto& [participant, recs] : by_participant) {
    Rng rng(combine_seed(seed, fnv1a64(participant)));
    rng.shuffle(recs);

    const int n = static_cast<int>(recs.size());
    std::array<double, 3> quota{};
    std::array<int, 3> count{};
    int assigned = 0;
    for (int i = 0; i < 3; ++i) {
      quota[i] = static_cast<double>(n) * ratios[i] / ratio_total;
      count[i] = static_cast<int>(std::floor(quota[i]));
      assigned += count[i];
    }
    // Largest remainder; ties favor train, then val, then test.
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&quota](int a, int b) {
      double fa = quota[a] - std::floor(quota[a]);
      double fb = quota[b] - std::floor(quota[b]);
      if (fa != fb) return fa > fb;
      return a < b;
    });
    for (int i = 0; assigned < n; i = (i + 1) % 3, ++assigned) count[order[i]] += 1;

    int cursor = 0;
    const std::array<Split, 3> split_of{Split::kTrain, Split::kVal, Split::kTest};
    for (int s = 0; s < 3; ++s) {
      for (int i = 0; i < count[s]; ++i, ++cursor) {
        ManifestRecord t = recs[cursor];
        t.split = split_of[s];
        snapshot.records.push_back(std::move(t));
      }
    }
  }

  std::vector<std::string> violations;
  snapshot.gallery_ids = build_gallery_ids(snapshot.records, &violations);
  if (!violations.empty()) {
    std::string joined = "make_splits: invariant violations:";
    for (const auto& v : violations) joined += "\n  " + v;
    throw ArgumentError(joined);
  }
  return snapshot;
}

namespace {

PointCloud reduce_text_cloud(PointCloud cloud, int n_points, const std::string& what) {
  if (cloud.n_points() < n_points) {
    throw LoadError(what + ": has " + std::to_string(cloud.n_points()) +
                    " points, fewer than the requested " + std::to_string(n_points));
  }
  if (cloud.n_points() > n_points) {
    std::vector<int> keep = farthest_point_sample(cloud, n_points);
    PointCloud reduced;
    reduced.points.resize(3, n_points);
    for (int i = 0; i < n_points; ++i) reduced.points.col(i) = cloud.points.col(keep[i]);
    cloud = std::move(reduced);
  }
  return normalize_cloud(cloud);
}

bool is_json_path(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return ext == ".json";
}

bool is_obj_path(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return ext == ".obj";
}

}  // namespace

PointCloud load_shape_cloud(const ManifestRecord& record, int n_points) {
  if (record.shape_path.empty()) {
    throw ArgumentError("load_shape_cloud: record '" + record.pair_id + "' has no shape path");
  }
  if (is_obj_path(record.shape_path)) {
    ShapeMesh mesh = load_mesh_obj(record.shape_path);
    // Seeded by shape id, so every record of a shape and the gallery see the
    // same sampled cloud.
    Rng rng(combine_seed(fnv1a64(record.shape_id), fnv1a64("shape")));
    return sample_mesh_cloud(mesh, n_points, rng);
  }
  return reduce_text_cloud(load_cloud_text(record.shape_path), n_points,
                           record.shape_path.string());
}

std::pair<PointCloud, PointCloud> load_pair(const ManifestRecord& record, int n_points) {
  if (record.sketch_path.empty()) {
    throw ArgumentError("load_pair: record '" + record.pair_id + "' has no sketch path");
  }

  Eigen::Matrix3d fix = Eigen::Matrix3d::Identity();
  if (record.alignment_fix) {
    fix = euler_xyz_rotation(record.alignment_fix->x(), record.alignment_fix->y(),
                             record.alignment_fix->z());
  }

  PointCloud sketch_cloud;
  if (is_json_path(record.sketch_path)) {
    Sketch sketch = load_sketch_json(record.sketch_path);
    if (record.alignment_fix) sketch = rotate_sketch(sketch, fix);
    sketch_cloud = sample_sketch_cloud(sketch, n_points);
  } else {
    // Precomputed synthetic sketches arrive as point-cloud text.
    PointCloud raw = load_cloud_text(record.sketch_path);
    if (record.alignment_fix) raw = rotate_cloud(raw, fix);
    sketch_cloud = reduce_text_cloud(std::move(raw), n_points, record.sketch_path.string());
  }

  return {std::move(sketch_cloud), load_shape_cloud(record, n_points)};
}

std::vector<std::string> unseen_participants(const DatasetSnapshot& snapshot) {
  // The held-out cohort is drawn from group A; group B sketchers always
  // contribute training data and report under their own block.
  std::set<std::string> in_test;
  std::set<std::string> in_train_val;
  for (const auto& r : snapshot.records) {
    if (r.split == Split::kTest && r.group == ParticipantGroup::kA) {
      in_test.insert(r.participant_id);
    }
    if (r.split == Split::kTrain || r.split == Split::kVal) in_train_val.insert(r.participant_id);
  }
  std::vector<std::string> out;
  for (const auto& p : in_test) {
    if (!in_train_val.count(p)) out.push_back(p);
  }
  return out;
}

}  // namespace vrsketch
