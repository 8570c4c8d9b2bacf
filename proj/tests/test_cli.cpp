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

#include "vrsketch/cli.hpp"
#include "vrsketch/io.hpp"
#include "vrsketch/log.hpp"

using namespace vrsketch;

namespace {

namespace fs = std::filesystem;

// A tiny but complete on-disk dataset in the converter's source layout.
struct CliFixture {
  fs::path root;

  explicit CliFixture(const std::string& name, int participants = 3, int shapes_each = 10,
                      int extra_shapes = 3) {
    root = fs::temp_directory_path() / ("vrsketch_cli_" + name);
    fs::remove_all(root);
    fs::create_directories(root / "sketches");
    fs::create_directories(root / "shapes");

    int shape_counter = 0;
    for (int p = 0; p < participants; ++p) {
      std::string participant = "part" + std::to_string(p);
      fs::create_directories(root / "sketches" / participant);
      for (int s = 0; s < shapes_each; ++s) {
        std::string shape_id = "shape" + std::to_string(shape_counter++);
        write_shape(shape_id);
        write_sketch(participant, shape_id);
      }
    }
    for (int g = 0; g < extra_shapes; ++g) {
      write_shape("gallery_extra" + std::to_string(g));
    }
    std::ofstream(root / "groups.csv") << "part0,A\npart1,A\npart2,B\n";
  }

  void write_shape(const std::string& shape_id) {
    // A small irregular tetrahedron, distorted per shape id.
    double t = 0.3 + 0.1 * (fnv1a64(shape_id) % 7);
    ShapeMesh mesh;
    mesh.vertices.resize(3, 4);
    mesh.vertices.col(0) = Eigen::Vector3d(0, 0, 0);
    mesh.vertices.col(1) = Eigen::Vector3d(1, 0, 0.1 * t);
    mesh.vertices.col(2) = Eigen::Vector3d(0.2, t, 0);
    mesh.vertices.col(3) = Eigen::Vector3d(0.1, 0.2, 1.0 - t);
    mesh.faces = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    save_mesh_obj(mesh, root / "shapes" / (shape_id + ".obj"));
  }

  void write_sketch(const std::string& participant, const std::string& shape_id) {
    double t = 0.2 + 0.07 * (fnv1a64(shape_id) % 9);
    Sketch sketch;
    for (int stroke_i = 0; stroke_i < 2; ++stroke_i) {
      Stroke stroke;
      stroke.points.resize(3, 6);
      for (int i = 0; i < 6; ++i) {
        double u = i / 5.0;
        stroke.points.col(i) = Eigen::Vector3d(u, t * std::sin(3 * u + stroke_i), stroke_i * t);
      }
      stroke.timestamps = {0, 1, 2, 3, 4, 5};
      stroke.width = 0.01;
      sketch.strokes.push_back(stroke);
    }
    save_sketch_json(sketch, root / "sketches" / participant / (shape_id + ".json"));
  }
};

}  // namespace

TEST_CASE("cli end-to-end: convert, split, prepare, train, eval, report") {
  CliFixture fx("e2e");
  const std::string manifest = (fx.root / "manifest.csv").string();
  const std::string split_manifest = (fx.root / "manifest_split.csv").string();
  const std::string runs_dir = (fx.root / "runs").string();
  const std::string cache_dir = (fx.root / "cache").string();
  const std::string report_dir = (fx.root / "report").string();

  // convert: source layout -> manifest
  CHECK(run_cli({"convert", fx.root.string(), "--out", manifest}) == 0);

  // split: hold out one participant, 7:1:2 for the rest
  CHECK(run_cli({"split", "--set", "dataset.manifest=" + manifest, "--set",
                 "dataset.heldout_participants=part2", "--out", split_manifest}) == 0);
  DatasetSnapshot snapshot = load_manifest(split_manifest);
  CHECK(snapshot.records_in(Split::kTest).size() >= 4);  // all of part2 at least
  for (const auto& r : snapshot.records_in(Split::kTest)) {
    if (r.participant_id == "part2") continue;
    CHECK((r.participant_id == "part0" || r.participant_id == "part1"));
  }

  // prepare: cache the sampled clouds, then a warm rerun recomputes nothing
  auto common = [&](std::vector<std::string> args) {
    std::vector<std::string> full = std::move(args);
    std::vector<std::string> sets = {
        "--set", "dataset.manifest=" + split_manifest,
        "--set", "dataset.cache_dir=" + cache_dir,
        "--set", "dataset.n_points=24",
    };
    full.insert(full.end(), sets.begin(), sets.end());
    return full;
  };
  CHECK(run_cli(common({"prepare"})) == 0);
  DatasetSnapshot prepared = load_manifest(split_manifest);
  PrepareStats warm;
  {
    DatasetConfig ds;
    ds.manifest = split_manifest;
    ds.cache_dir = cache_dir;
    ds.n_points = 24;
    warm = prepare_cache(prepared, ds);
  }
  CHECK(warm.written == 0);
  CHECK(warm.skipped > 0);

  // train: tiny encoder, 2 epochs, one seed
  auto train_args = common({"train"});
  const std::vector<std::string> extras = {
      "--set", "model.sa_levels=8:0.4:6:8-8 / 4:0.8:4:8-16",
      "--set", "model.sa_global_widths=16-16",
      "--set", "model.head_hidden=12",
      "--set", "model.embedding_dim=8",
      "--set", "train.epochs=2",
      "--set", "train.batch_size=4",
      "--set", "train.runs_dir=" + runs_dir,
      "--set", "experiment_name=smoke",
      "--seed", "3",
  };
  train_args.insert(train_args.end(), extras.begin(), extras.end());
  CHECK(run_cli(train_args) == 0);
  CHECK(fs::exists(fs::path(runs_dir) / "smoke" / "config_resolved.txt"));
  CHECK(fs::exists(fs::path(runs_dir) / "smoke" / "summary.json"));
  CHECK(fs::exists(fs::path(runs_dir) / "smoke" / "3" / "metrics.jsonl"));
  CHECK(fs::exists(fs::path(runs_dir) / "smoke" / "3" / "epoch_2.ckpt"));

  // eval: report files appear, exit 0
  auto eval_args = common({"eval", (fs::path(runs_dir) / "smoke" / "3" / "epoch_2.ckpt").string(),
                           "--set", "eval.report_dir=" + report_dir});
  CHECK(run_cli(eval_args) == 0);
  CHECK(fs::exists(fs::path(report_dir) / "report.csv"));
  CHECK(fs::exists(fs::path(report_dir) / "report.txt"));
  CHECK(fs::exists(fs::path(report_dir) / "gallery.idx"));

  // eval again: the persisted gallery index is reused (same fingerprint)
  CHECK(run_cli(eval_args) == 0);

  // report: aggregates the metrics logs
  CHECK(run_cli({"report", (fs::path(runs_dir) / "smoke").string()}) == 0);
}

TEST_CASE("cli exit codes distinguish validation errors from runtime failures") {
  // Unknown config key: validation error -> 1.
  CHECK(run_cli({"train", "--set", "bogus.key=1"}) == 1);
  // Unknown preset: validation error -> 1.
  CHECK(run_cli({"train", "--preset", "exp99"}) == 1);
  // Missing manifest at runtime -> 2.
  CHECK(run_cli({"train", "--set", "dataset.manifest=/no/such/manifest.csv"}) == 2);
  // Unknown flag: CLI parse error -> 1.
  CHECK(run_cli({"train", "--bogus-flag"}) == 1);
}

TEST_CASE("prepare lists corrupt inputs per file and fails with exit 2") {
  CliFixture fx("corrupt", 1, 2, 0);
  // Corrupt one OBJ after manifest creation.
  const std::string manifest = (fx.root / "manifest.csv").string();
  CHECK(run_cli({"convert", fx.root.string(), "--out", manifest}) == 0);
  std::ofstream(fx.root / "shapes" / "shape0.obj") << "v 0 0 0\nf 1 1 1\n";

  WarningCapture capture;  // swallow the zero-area warnings
  int code = run_cli({"prepare", "--set", "dataset.manifest=" + manifest, "--set",
                      "dataset.cache_dir=" + (fx.root / "cache").string(), "--set",
                      "dataset.n_points=16"});
  CHECK(code == 2);
}

TEST_CASE("explain prints the resolved config without running") {
  CHECK(run_cli({"train", "--preset", "exp01", "--explain"}) == 0);
  CHECK(run_cli({"--list-presets"}) == 0);
}

TEST_CASE("size-sweep dedupes fractions, skips sub-batch ones and writes the curve") {
  CliFixture fx("sweep");
  const std::string manifest = (fx.root / "manifest.csv").string();
  const std::string split_manifest = (fx.root / "manifest_split.csv").string();
  CHECK(run_cli({"convert", fx.root.string(), "--out", manifest}) == 0);
  CHECK(run_cli({"split", "--set", "dataset.manifest=" + manifest, "--set",
                 "dataset.heldout_participants=part2", "--out", split_manifest}) == 0);

  const std::string out_csv = (fx.root / "sweep.csv").string();
  WarningCapture capture;
  int code = run_cli({"size-sweep",
                      "--fractions", "0.05", "--fractions", "0.5", "--fractions", "0.5",
                      "--fractions", "1.0",
                      "--out", out_csv,
                      "--set", "dataset.manifest=" + split_manifest,
                      "--set", "dataset.cache_dir=" + (fx.root / "cache").string(),
                      "--set", "dataset.n_points=24",
                      "--set", "model.sa_levels=8:0.4:6:8-8 / 4:0.8:4:8-16",
                      "--set", "model.sa_global_widths=16-16",
                      "--set", "model.head_hidden=12",
                      "--set", "model.embedding_dim=8",
                      "--set", "train.epochs=1",
                      "--set", "train.batch_size=4",
                      "--set", "train.runs_dir=" + (fx.root / "runs").string(),
                      "--seed", "1"});
  CHECK(code == 0);
  CHECK(capture.contains("less than one batch"));  // the 0.05 fraction

  std::ifstream csv(out_csv);
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 3);  // header + {0.5, 1.0}; duplicates removed, 0.05 skipped
}

TEST_CASE("changing n_points recomputes into a separate cache keyspace") {
  CliFixture fx("cachekey", 1, 2, 0);
  const std::string manifest = (fx.root / "manifest.csv").string();
  CHECK(run_cli({"convert", fx.root.string(), "--out", manifest}) == 0);
  DatasetSnapshot snapshot = load_manifest(manifest);

  DatasetConfig ds;
  ds.manifest = manifest;
  ds.cache_dir = (fx.root / "cache").string();
  ds.n_points = 16;
  PrepareStats first = prepare_cache(snapshot, ds);
  CHECK(first.written > 0);
  ds.n_points = 32;
  PrepareStats second = prepare_cache(snapshot, ds);
  CHECK(second.written == first.written);  // full recompute under the new key
  CHECK(fs::exists(fs::path(ds.cache_dir.string()) / "n16_v1"));
  CHECK(fs::exists(fs::path(ds.cache_dir.string()) / "n32_v1"));
}
