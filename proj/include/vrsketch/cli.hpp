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

#include <string>
#include <vector>

#include "vrsketch/config.hpp"
#include "vrsketch/dataset.hpp"
#include "vrsketch/trainer.hpp"

namespace vrsketch {

// Exit codes: 0 success, 1 validation error, 2 runtime failure.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

// Pipeline pieces shared by the commands and the integration tests.

// Loads the pairs of one split, preferring the prepare-cache, falling back to
// sampling from the source files.
std::vector<TrainingPair> load_split_pairs(const DatasetSnapshot& snapshot, Split split,
                                           const DatasetConfig& dataset);

// Gallery shapes (test + gallery_only), one cloud per shape id.
std::vector<std::pair<std::string, PointCloud>> load_gallery_clouds(
    const DatasetSnapshot& snapshot, const DatasetConfig& dataset);

struct PrepareStats {
  int written = 0;
  int skipped = 0;
  std::vector<std::string> failures;
};

PrepareStats prepare_cache(const DatasetSnapshot& snapshot, const DatasetConfig& dataset);

}  // namespace vrsketch
