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

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "vrsketch/errors.hpp"
#include "vrsketch/io.hpp"
#include "vrsketch/log.hpp"

using namespace vrsketch;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "vrsketch_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("point cloud text round-trips") {
  PointCloud cloud;
  cloud.points.resize(3, 3);
  cloud.points << 0.1, -2.5, 3.25, 0.2, 0.0, -1.0, 0.3, 4.5, 0.125;
  auto path = temp_dir() / "cloud.xyz";
  save_cloud_text(cloud, path);
  PointCloud loaded = load_cloud_text(path);
  CHECK(loaded.points.isApprox(cloud.points, 1e-15));
}

TEST_CASE("point cloud text rejects malformed rows") {
  auto path = temp_dir() / "bad_cloud.xyz";
  std::ofstream(path) << "0 0 0\n1 nope 2\n";
  CHECK_THROWS_AS(load_cloud_text(path), LoadError);
}

TEST_CASE("sketch json round-trips strokes, widths and timestamps") {
  Sketch sketch;
  Stroke stroke;
  stroke.points.resize(3, 3);
  stroke.points << 0, 1, 2, 0, 0.5, 1.0, 0, -0.5, -1.0;
  stroke.timestamps = {0.0, 0.1, 0.25};
  stroke.width = 0.02;
  sketch.strokes = {stroke};

  auto path = temp_dir() / "sketch.json";
  save_sketch_json(sketch, path);
  Sketch loaded = load_sketch_json(path);
  REQUIRE(loaded.strokes.size() == 1);
  CHECK(loaded.strokes[0].width == doctest::Approx(0.02));
  CHECK(loaded.strokes[0].points.isApprox(stroke.points, 1e-12));
  CHECK(loaded.strokes[0].timestamps[2] == doctest::Approx(0.25));
}

TEST_CASE("sketch json enforces the stroke invariants") {
  auto path = temp_dir() / "bad_sketch.json";

  std::ofstream(path) << R"({"strokes": [{"width": 0.1, "points": [[0,0,0,1],[1,0,0,0]]}]})";
  CHECK_THROWS_AS(load_sketch_json(path), LoadError);  // decreasing timestamps

  std::ofstream(path) << R"({"strokes": [{"width": -1, "points": [[0,0,0,0],[1,0,0,1]]}]})";
  CHECK_THROWS_AS(load_sketch_json(path), LoadError);  // non-positive width

  std::ofstream(path) << R"({"strokes": [{"width": 1, "points": [[0,0,0,0]]}]})";
  CHECK_THROWS_AS(load_sketch_json(path), LoadError);  // single-point stroke
}

TEST_CASE("obj loader reads vertices and triangulates faces, ignoring other records") {
  auto path = temp_dir() / "mesh.obj";
  std::ofstream(path) << "# comment\n"
                      << "vn 0 0 1\n"
                      << "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
                      << "f 1/1/1 2/2/2 3/3/3 4/4/4\n";
  ShapeMesh mesh = load_mesh_obj(path);
  CHECK(mesh.vertices.cols() == 4);
  CHECK(mesh.faces.size() == 2);  // quad fan-triangulated
}

TEST_CASE("obj loader drops zero-area triangles with a warning") {
  auto path = temp_dir() / "degenerate.obj";
  std::ofstream(path) << "v 0 0 0\nv 1 0 0\nv 2 0 0\nv 0 1 0\n"
                      << "f 1 2 3\n"   // collinear, zero area
                      << "f 1 2 4\n";  // real
  WarningCapture capture;
  ShapeMesh mesh = load_mesh_obj(path);
  CHECK(mesh.faces.size() == 1);
  CHECK(capture.contains("zero-area"));
}

TEST_CASE("obj loader rejects out-of-range face indices") {
  auto path = temp_dir() / "out_of_range.obj";
  std::ofstream(path) << "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n";
  CHECK_THROWS_AS(load_mesh_obj(path), LoadError);
}

TEST_CASE("obj loader resolves negative indices from the end") {
  auto path = temp_dir() / "negative.obj";
  std::ofstream(path) << "v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n";
  ShapeMesh mesh = load_mesh_obj(path);
  REQUIRE(mesh.faces.size() == 1);
  CHECK(mesh.faces[0] == std::array<int, 3>{0, 1, 2});
}
