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
#include <string>

#include <json.hpp>

#include "vrsketch/encoder.hpp"

namespace vrsketch {

nlohmann::json model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j);

// Combined parameter fingerprint over all branches; identifies the producing
// checkpoint in derived artifacts such as gallery indexes.
std::uint64_t model_fingerprint(const CrossModalModel& model);

struct LoadedCheckpoint {
  CrossModalModel model;
  int epoch = 0;
  std::map<std::string, std::string> rng_states;
};

// Binary container: magic + version, a JSON header echoing the model config,
// epoch and RNG states, then raw little-endian float64 tensors.
void save_checkpoint(const std::filesystem::path& path, const CrossModalModel& model, int epoch,
                     const std::map<std::string, std::string>& rng_states = {});

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

// Loads a Siamese checkpoint and initializes both branches of a heterogeneous
// model from its shared encoder. Throws CheckpointError when the file is not
// a Siamese model or the config disagrees with `expected` (when given).
CrossModalModel clone_checkpoint_for_heterogeneous(const std::filesystem::path& donor_path,
                                                   const ModelConfig* expected = nullptr);

}  // namespace vrsketch
