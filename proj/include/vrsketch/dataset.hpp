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

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vrsketch/geometry.hpp"

namespace vrsketch {

enum class Split { kTrain, kVal, kTest, kGalleryOnly };
enum class ParticipantGroup { kA, kB };

Split parse_split(const std::string& name);
std::string split_name(Split split);

// One sketch-shape pair. Paths are stored resolved against the manifest
// directory; shape_id is the shape path stem and identifies the shape in the
// retrieval gallery.
struct ManifestRecord {
  std::string pair_id;
  std::string participant_id;
  ParticipantGroup group = ParticipantGroup::kA;
  Split split = Split::kTrain;
  std::filesystem::path sketch_path;
  std::filesystem::path shape_path;
  bool is_synthetic = false;
  // Euler degrees about x/y/z applied to the sketch at load time, for the
  // manually-rotated alignment fixes.
  std::optional<Eigen::Vector3d> alignment_fix;
  std::string shape_id;
};

struct DatasetSnapshot {
  std::vector<ManifestRecord> records;
  std::vector<std::string> gallery_ids;  // sorted, unique

  std::vector<ManifestRecord> records_in(Split split) const;
};

inline constexpr const char* kManifestHeader =
    "pair_id,participant_id,group,split,sketch_path,shape_path,is_synthetic,rx,ry,rz";

// Loads and validates a manifest CSV. Rows violating the invariants are
// reported with their row numbers in a single LoadError. The gallery is the
// set of test shapes plus gallery_only shapes; a shape that also appears in
// train or val is an invariant violation.
DatasetSnapshot load_manifest(const std::filesystem::path& path);

void save_manifest(const DatasetSnapshot& snapshot, const std::filesystem::path& path);

// Re-splits records: all sketches of held-out participants go to test, the
// remaining participants' unique-shape sketches are split per participant
// proportionally to `ratios` (largest remainder). Records whose shape is
// sketched more than once are excluded with a warning; gallery_only records
// pass through. Deterministic given the seed.
DatasetSnapshot make_splits(const std::vector<ManifestRecord>& records,
                            const std::vector<std::string>& heldout_participants,
                            std::array<int, 3> ratios, std::uint64_t seed);

// Loads one pair: the sketch (JSON strokes, or point-cloud text for
// precomputed synthetic sketches) with the alignment fix applied before
// sampling, and the shape (OBJ mesh or point-cloud text); both sampled to
// n_points and normalized. All sampling seeds derive from pair_id.
std::pair<PointCloud, PointCloud> load_pair(const ManifestRecord& record, int n_points);

// Loads only the shape cloud (used for gallery_only records).
PointCloud load_shape_cloud(const ManifestRecord& record, int n_points);

// Participants whose sketches appear in the test split only: the held-out
// cohort of the per-group report.
std::vector<std::string> unseen_participants(const DatasetSnapshot& snapshot);

}  // namespace vrsketch
