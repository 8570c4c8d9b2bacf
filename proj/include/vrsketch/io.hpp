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
#include <string>

#include "vrsketch/geometry.hpp"

namespace vrsketch {

// Point-cloud text format: one whitespace-separated "x y z" triple per line.
PointCloud load_cloud_text(const std::filesystem::path& path);
void save_cloud_text(const PointCloud& cloud, const std::filesystem::path& path);

// Sketch JSON: {"strokes": [{"width": w, "points": [[x, y, z, t], ...]}, ...]}
Sketch load_sketch_json(const std::filesystem::path& path);
void save_sketch_json(const Sketch& sketch, const std::filesystem::path& path);

// Wavefront OBJ, vertices and triangular faces only; other records ignored.
// Zero-area triangles are dropped during ingestion with a warning.
ShapeMesh load_mesh_obj(const std::filesystem::path& path);
void save_mesh_obj(const ShapeMesh& mesh, const std::filesystem::path& path);

}  // namespace vrsketch
