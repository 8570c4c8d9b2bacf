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

#include "vrsketch/augment.hpp"
#include "vrsketch/encoder.hpp"
#include "vrsketch/loss.hpp"
#include "vrsketch/trainer.hpp"

namespace vrsketch {

struct DatasetConfig {
  std::filesystem::path manifest;            // explicit path wins
  std::filesystem::path synthetic_manifest;  // optional synthetic/style pool
  std::string data_root = "data";
  std::string manifest_name = "manifest.csv";
  std::string synthetic_manifest_name;
  int n_points = 1024;
  std::filesystem::path cache_dir;  // default: $VRSKETCH_CACHE_ROOT or <data_root>/cache
  std::vector<std::string> heldout_participants;
  std::uint64_t split_seed = 7;

  std::filesystem::path resolved_manifest() const;
  std::filesystem::path resolved_synthetic_manifest() const;  // empty when unset
  std::filesystem::path resolved_cache_dir() const;
};

struct EvalConfig {
  std::filesystem::path checkpoint;
  std::filesystem::path report_dir = "reports";
  std::filesystem::path gallery_index;  // optional persisted index
};

// Fully-typed run configuration: the six sections plus the experiment name
// and optional preset. Unknown keys are rejected at parse time; the resolved
// form is echoed into every output directory.
struct RunConfig {
  std::string experiment_name = "default";
  std::string preset;
  DatasetConfig dataset;
  ModelConfig model;
  LossConfig loss;
  TrainConfig train;
  AugmentConfig augment;
  EvalConfig eval;
  std::filesystem::path donor_checkpoint;

  std::string resolved_text() const;
};

// Key-value text with [section] headers and '#' comments. Later assignments
// win. The resolution order is: defaults, config file, preset, command-line
// overrides.
RunConfig resolve_run_config(const std::optional<std::filesystem::path>& config_file,
                             const std::string& preset_flag,
                             const std::vector<std::pair<std::string, std::string>>& overrides);

std::vector<std::string> preset_names();
std::vector<std::pair<std::string, std::string>> preset_overrides(const std::string& name);

}  // namespace vrsketch
