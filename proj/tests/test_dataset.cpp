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
#include <map>
#include <set>

#include "vrsketch/dataset.hpp"
#include "vrsketch/errors.hpp"
#include "vrsketch/io.hpp"
#include "vrsketch/log.hpp"

using namespace vrsketch;

namespace {

namespace fs = std::filesystem;

// Writes a minimal dataset: sketches (JSON or xyz), shapes (OBJ), and a
// manifest referencing them with relative paths.
struct Fixture {
  fs::path dir;

  explicit Fixture(const std::string& name) {
    dir = fs::temp_directory_path() / ("vrsketch_ds_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir / "sketches");
    fs::create_directories(dir / "shapes");
  }

  void write_sketch(const std::string& stem) {
    Sketch sketch;
    Stroke stroke;
    stroke.points.resize(3, 3);
    stroke.points << 0, 0.5, 1, 0, 0.2, 0, 0, 0.1, 0.3;
    stroke.timestamps = {0, 1, 2};
    stroke.width = 0.01;
    sketch.strokes = {stroke};
    save_sketch_json(sketch, dir / "sketches" / (stem + ".json"));
  }

  void write_sketch_cloud(const std::string& stem, int n = 32) {
    PointCloud cloud;
    cloud.points.resize(3, n);
    for (int i = 0; i < n; ++i) {
      double t = i / double(n - 1);
      cloud.points.col(i) = Eigen::Vector3d(t, std::sin(6.28 * t), 0.1 * t);
    }
    save_cloud_text(cloud, dir / "sketches" / (stem + ".xyz"));
  }

  void write_shape(const std::string& stem) {
    ShapeMesh mesh;
    mesh.vertices.resize(3, 4);
    mesh.vertices.col(0) = Eigen::Vector3d(0, 0, 0);
    mesh.vertices.col(1) = Eigen::Vector3d(1, 0, 0);
    mesh.vertices.col(2) = Eigen::Vector3d(1, 1, 0);
    mesh.vertices.col(3) = Eigen::Vector3d(0, 0, 1);
    mesh.faces = {{0, 1, 2}, {0, 1, 3}, {1, 2, 3}};
    save_mesh_obj(mesh, dir / "shapes" / (stem + ".obj"));
  }

  fs::path write_manifest(const std::vector<std::string>& rows,
                          const std::string& name = "manifest.csv") {
    fs::path path = dir / name;
    std::ofstream out(path);
    out << kManifestHeader << "\n";
    for (const auto& row : rows) out << row << "\n";
    return path;
  }
};

}  // namespace

TEST_CASE("well-formed manifest loads all records") {
  Fixture fx("ok");
  fx.write_sketch("sk1");
  fx.write_sketch("sk2");
  fx.write_shape("sh1");
  fx.write_shape("sh2");
  fx.write_shape("sh3");
  auto path = fx.write_manifest({
      "p1,alice,A,train,sketches/sk1.json,shapes/sh1.obj,0,,,",
      "p2,bob,B,test,sketches/sk2.json,shapes/sh2.obj,0,,,",
      "g1,gallery,A,gallery_only,,shapes/sh3.obj,0,,,",
  });
  DatasetSnapshot snapshot = load_manifest(path);
  CHECK(snapshot.records.size() == 3);
  CHECK(snapshot.records_in(Split::kTrain).size() == 1);
  CHECK(snapshot.records_in(Split::kTest).size() == 1);
  // Gallery: the test shape and the gallery_only shape.
  CHECK(snapshot.gallery_ids == std::vector<std::string>{"sh2", "sh3"});
}

TEST_CASE("duplicate pair ids are rejected with the offending row") {
  Fixture fx("dup");
  fx.write_sketch("sk1");
  fx.write_shape("sh1");
  fx.write_shape("sh2");
  auto path = fx.write_manifest({
      "p1,alice,A,train,sketches/sk1.json,shapes/sh1.obj,0,,,",
      "p1,alice,A,train,sketches/sk1.json,shapes/sh2.obj,0,,,",
  });
  CHECK_THROWS_WITH_AS(load_manifest(path),
                       doctest::Contains("duplicate pair_id 'p1'"), LoadError);
}

TEST_CASE("bad header and missing files are reported with row numbers") {
  Fixture fx("bad");
  fx.write_sketch("sk1");
  fx.write_shape("sh1");

  fs::path bad_header = fx.dir / "bad_header.csv";
  std::ofstream(bad_header) << "pair_id,participant_id\np1,alice\n";
  CHECK_THROWS_AS(load_manifest(bad_header), LoadError);

  auto path = fx.write_manifest({
      "p1,alice,A,train,sketches/missing.json,shapes/sh1.obj,0,,,",
  });
  CHECK_THROWS_WITH_AS(load_manifest(path), doctest::Contains("row 2"), LoadError);
}

TEST_CASE("synthetic records cannot enter val or test") {
  Fixture fx("synth");
  fx.write_sketch_cloud("ss1");
  fx.write_shape("sh1");
  auto path = fx.write_manifest({
      "p1,gen,A,test,sketches/ss1.xyz,shapes/sh1.obj,1,,,",
  });
  CHECK_THROWS_WITH_AS(load_manifest(path), doctest::Contains("synthetic"), LoadError);
}

TEST_CASE("a shape in both train and gallery is an invariant violation") {
  Fixture fx("leak");
  fx.write_sketch("sk1");
  fx.write_sketch("sk2");
  fx.write_shape("sh1");
  auto path = fx.write_manifest({
      "p1,alice,A,train,sketches/sk1.json,shapes/sh1.obj,0,,,",
      "p2,bob,A,test,sketches/sk2.json,shapes/sh1.obj,0,,,",
  });
  CHECK_THROWS_WITH_AS(load_manifest(path),
                       doctest::Contains("both in the gallery and in train/val"), LoadError);
}

TEST_CASE("make_splits sends held-out participants entirely to test") {
  std::vector<ManifestRecord> records;
  for (int i = 0; i < 10; ++i) {
    ManifestRecord r;
    r.pair_id = "p" + std::to_string(i);
    r.participant_id = "held";
    r.shape_id = "shape" + std::to_string(i);
    records.push_back(r);
  }
  DatasetSnapshot snapshot = make_splits(records, {"held"}, {7, 1, 2}, 1);
  CHECK(snapshot.records_in(Split::kTest).size() == 10);
  CHECK(snapshot.records_in(Split::kTrain).empty());
}

TEST_CASE("make_splits assigns 7/1/2 for a 10-record participant") {
  std::vector<ManifestRecord> records;
  for (int i = 0; i < 10; ++i) {
    ManifestRecord r;
    r.pair_id = "p" + std::to_string(i);
    r.participant_id = "alice";
    r.shape_id = "shape" + std::to_string(i);
    records.push_back(r);
  }
  DatasetSnapshot snapshot = make_splits(records, {}, {7, 1, 2}, 5);
  CHECK(snapshot.records_in(Split::kTrain).size() == 7);
  CHECK(snapshot.records_in(Split::kVal).size() == 1);
  CHECK(snapshot.records_in(Split::kTest).size() == 2);
  // The test shapes form the gallery; train/val shapes stay out.
  CHECK(snapshot.gallery_ids.size() == 2);
}

TEST_CASE("make_splits is deterministic given the seed") {
  std::vector<ManifestRecord> records;
  for (int i = 0; i < 30; ++i) {
    ManifestRecord r;
    r.pair_id = "p" + std::to_string(i);
    r.participant_id = "part" + std::to_string(i % 3);
    r.shape_id = "shape" + std::to_string(i);
    records.push_back(r);
  }
  auto a = make_splits(records, {}, {7, 1, 2}, 42);
  auto b = make_splits(records, {}, {7, 1, 2}, 42);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].pair_id == b.records[i].pair_id);
    CHECK(a.records[i].split == b.records[i].split);
  }
  auto c = make_splits(records, {}, {7, 1, 2}, 43);
  bool any_differs = false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    std::map<std::string, Split> c_map;
    for (const auto& r : c.records) c_map[r.pair_id] = r.split;
    if (c_map.at(a.records[i].pair_id) != a.records[i].split) any_differs = true;
  }
  CHECK(any_differs);
}

TEST_CASE("make_splits drops non-unique shapes with a warning") {
  std::vector<ManifestRecord> records;
  for (int i = 0; i < 12; ++i) {
    ManifestRecord r;
    r.pair_id = "p" + std::to_string(i);
    r.participant_id = "alice";
    r.shape_id = "shape" + std::to_string(i % 10);  // shapes 0 and 1 repeat
    records.push_back(r);
  }
  WarningCapture capture;
  DatasetSnapshot snapshot = make_splits(records, {}, {7, 1, 2}, 9);
  CHECK(snapshot.records.size() == 8);  // 4 records over 2 duplicated shapes excluded
  CHECK(capture.contains("non-unique"));
}

TEST_CASE("make_splits validates ratios and held-out participants") {
  std::vector<ManifestRecord> records(1);
  records[0].pair_id = "p0";
  records[0].participant_id = "alice";
  records[0].shape_id = "s0";
  CHECK_THROWS_AS(make_splits(records, {}, {0, 1, 2}, 1), ArgumentError);
  CHECK_THROWS_AS(make_splits(records, {"ghost"}, {7, 1, 2}, 1), ArgumentError);
}

TEST_CASE("load_pair applies the alignment fix before sampling") {
  Fixture fx("align");
  // A single straight stroke along +x.
  Sketch sketch;
  Stroke stroke;
  stroke.points.resize(3, 2);
  stroke.points.col(0) = Eigen::Vector3d(0, 0, 0);
  stroke.points.col(1) = Eigen::Vector3d(1, 0, 0);
  stroke.timestamps = {0, 1};
  sketch.strokes = {stroke};
  save_sketch_json(sketch, fx.dir / "sketches" / "line.json");
  fx.write_shape("sh1");

  auto path = fx.write_manifest({
      "p1,alice,A,train,sketches/line.json,shapes/sh1.obj,0,0,0,90",
      "p2,alice,A,train,sketches/line.json,shapes/sh1.obj,0,,,",
  });
  // Loading validates gallery invariants; this manifest has no test rows.
  DatasetSnapshot snapshot = load_manifest(path);

  auto [rotated, shape_a] = load_pair(snapshot.records[0], 8);
  auto [plain, shape_b] = load_pair(snapshot.records[1], 8);
  // The +x stroke rotated 90 degrees about z spans y instead of x.
  CHECK(rotated.points.row(0).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(rotated.points.row(1).maxCoeff() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(plain.points.row(1).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(plain.points.row(0).maxCoeff() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(satisfies_normalized_invariant(rotated));

  // Shared shape id: both loads sample the identical shape cloud.
  CHECK(shape_a.points.isApprox(shape_b.points, 0.0));
}

TEST_CASE("synthetic sketches load via the point-cloud text path") {
  Fixture fx("textload");
  fx.write_sketch_cloud("ss1", 40);
  fx.write_shape("sh1");
  auto path = fx.write_manifest({
      "p1,gen,A,train,sketches/ss1.xyz,shapes/sh1.obj,1,,,",
  });
  DatasetSnapshot snapshot = load_manifest(path);
  auto [sketch_cloud, shape_cloud] = load_pair(snapshot.records[0], 16);
  CHECK(sketch_cloud.n_points() == 16);
  CHECK(satisfies_normalized_invariant(sketch_cloud));
  CHECK(shape_cloud.n_points() == 16);
}

TEST_CASE("loading the same record twice produces identical clouds") {
  Fixture fx("determinism");
  fx.write_sketch("sk1");
  fx.write_shape("sh1");
  auto path = fx.write_manifest({
      "p1,alice,A,train,sketches/sk1.json,shapes/sh1.obj,0,,,",
  });
  DatasetSnapshot snapshot = load_manifest(path);
  auto [sk_a, sh_a] = load_pair(snapshot.records[0], 24);
  auto [sk_b, sh_b] = load_pair(snapshot.records[0], 24);
  CHECK(sk_a.points.isApprox(sk_b.points, 0.0));
  CHECK(sh_a.points.isApprox(sh_b.points, 0.0));
}

TEST_CASE("malformed pair files surface parse errors naming the path") {
  Fixture fx("badpair");
  std::ofstream(fx.dir / "sketches" / "broken.json") << "{ not json";
  fx.write_shape("sh1");
  auto path = fx.write_manifest({
      "p1,alice,A,train,sketches/broken.json,shapes/sh1.obj,0,,,",
  });
  DatasetSnapshot snapshot = load_manifest(path);
  CHECK_THROWS_WITH_AS(load_pair(snapshot.records[0], 8), doctest::Contains("broken.json"),
                       LoadError);
}

TEST_CASE("unseen participants are those with test records only") {
  std::vector<ManifestRecord> records;
  auto add = [&records](const std::string& pair, const std::string& participant, Split split) {
    ManifestRecord r;
    r.pair_id = pair;
    r.participant_id = participant;
    r.shape_id = "shape_" + pair;
    r.split = split;
    records.push_back(r);
  };
  add("a1", "alice", Split::kTrain);
  add("a2", "alice", Split::kTest);
  add("b1", "bob", Split::kTest);
  add("c1", "carol", Split::kVal);
  DatasetSnapshot snapshot;
  snapshot.records = records;
  auto unseen = unseen_participants(snapshot);
  CHECK(unseen == std::vector<std::string>{"bob"});
}

TEST_CASE("manifest save/load round-trips") {
  Fixture fx("roundtrip");
  fx.write_sketch("sk1");
  fx.write_shape("sh1");
  fx.write_shape("sh2");
  auto path = fx.write_manifest({
      "p1,alice,A,train,sketches/sk1.json,shapes/sh1.obj,0,10,0,90",
      "g1,gallery,A,gallery_only,,shapes/sh2.obj,0,,,",
  });
  DatasetSnapshot snapshot = load_manifest(path);
  auto out_path = fx.dir / "copy.csv";
  save_manifest(snapshot, out_path);
  DatasetSnapshot reloaded = load_manifest(out_path);
  REQUIRE(reloaded.records.size() == 2);
  CHECK(reloaded.records[0].alignment_fix.has_value());
  CHECK(reloaded.records[0].alignment_fix->z() == doctest::Approx(90.0));
  CHECK(reloaded.gallery_ids == snapshot.gallery_ids);
}
