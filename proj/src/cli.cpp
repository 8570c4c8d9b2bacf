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

#include "vrsketch/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "vrsketch/checkpoint.hpp"
#include "vrsketch/errors.hpp"
#include "vrsketch/io.hpp"
#include "vrsketch/log.hpp"
#include "vrsketch/retrieval.hpp"

namespace vrsketch {

namespace {

std::filesystem::path cache_subdir(const DatasetConfig& dataset) {
  return dataset.resolved_cache_dir() /
         ("n" + std::to_string(dataset.n_points) + "_v" + std::to_string(kSamplerVersion));
}

std::filesystem::path sketch_cache_path(const DatasetConfig& dataset,
                                        const ManifestRecord& record) {
  return cache_subdir(dataset) / (record.pair_id + ".sketch.xyz");
}

std::filesystem::path shape_cache_path(const DatasetConfig& dataset,
                                       const ManifestRecord& record) {
  return cache_subdir(dataset) / (record.shape_id + ".shape.xyz");
}

PointCloud load_cached_or(const std::filesystem::path& cache_path,
                          const std::function<PointCloud()>& fallback) {
  if (std::filesystem::exists(cache_path)) {
    PointCloud cloud = load_cloud_text(cache_path);
    return normalize_cloud(cloud);
  }
  return fallback();
}

void write_config_echo(const RunConfig& config, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "config_resolved.txt");
  out << config.resolved_text();
}

struct CommonFlags {
  std::string config_file;
  std::string preset;
  std::vector<std::string> sets;
  int seed = -1;
  bool deterministic = false;
  bool explain = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_file, "Run configuration file");
  cmd->add_option("--preset", flags.preset, "Experiment preset (see --list-presets)");
  cmd->add_option("--set", flags.sets, "Override a config key: section.key=value");
  cmd->add_option("--seed", flags.seed, "Train with this single seed");
  cmd->add_flag("--deterministic", flags.deterministic,
                "Reproducible single-threaded execution");
  cmd->add_flag("--explain", flags.explain, "Print the resolved config and exit");
}

RunConfig config_from_flags(const CommonFlags& flags) {
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& kv : flags.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects section.key=value, got '" + kv + "'");
    }
    overrides.push_back({kv.substr(0, eq), kv.substr(eq + 1)});
  }
  if (flags.seed >= 0) overrides.push_back({"train.seeds", std::to_string(flags.seed)});
  if (flags.deterministic) overrides.push_back({"train.deterministic", "true"});

  std::optional<std::filesystem::path> file;
  if (!flags.config_file.empty()) file = flags.config_file;
  return resolve_run_config(file, flags.preset, overrides);
}

std::map<std::string, std::string> ground_truth_of(const std::vector<TrainingPair>& pairs) {
  std::map<std::string, std::string> gt;
  for (const auto& p : pairs) gt[p.pair_id] = p.shape_id;
  return gt;
}

// ---- commands ---------------------------------------------------------

int cmd_prepare(const CommonFlags& flags) {
  RunConfig config = config_from_flags(flags);
  if (flags.explain) {
    std::cout << config.resolved_text();
    return 0;
  }
  DatasetSnapshot snapshot = load_manifest(config.dataset.resolved_manifest());
  PrepareStats stats = prepare_cache(snapshot, config.dataset);
  std::cout << "prepared " << stats.written << " cloud(s), " << stats.skipped
            << " already cached under " << cache_subdir(config.dataset).string() << "\n";
  if (!stats.failures.empty()) {
    std::cerr << "prepare failed for " << stats.failures.size() << " file(s):\n";
    for (const auto& f : stats.failures) std::cerr << "  " << f << "\n";
    return 2;
  }
  return 0;
}

int cmd_split(const CommonFlags& flags, const std::string& out_path) {
  RunConfig config = config_from_flags(flags);
  if (flags.explain) {
    std::cout << config.resolved_text();
    return 0;
  }
  DatasetSnapshot snapshot = load_manifest(config.dataset.resolved_manifest());
  DatasetSnapshot split = make_splits(snapshot.records, config.dataset.heldout_participants,
                                      {7, 1, 2}, config.dataset.split_seed);
  save_manifest(split, out_path);
  int train_n = static_cast<int>(split.records_in(Split::kTrain).size());
  int val_n = static_cast<int>(split.records_in(Split::kVal).size());
  int test_n = static_cast<int>(split.records_in(Split::kTest).size());
  std::cout << "split written to " << out_path << ": " << train_n << " train / " << val_n
            << " val / " << test_n << " test, gallery " << split.gallery_ids.size() << "\n";
  return 0;
}

int cmd_train(const CommonFlags& flags) {
  RunConfig config = config_from_flags(flags);
  if (flags.explain) {
    std::cout << config.resolved_text();
    return 0;
  }
  DatasetSnapshot snapshot = load_manifest(config.dataset.resolved_manifest());
  auto train_pairs = load_split_pairs(snapshot, Split::kTrain, config.dataset);
  auto val_pairs = load_split_pairs(snapshot, Split::kVal, config.dataset);

  std::vector<TrainingPair> synthetic_pairs;
  auto synth_manifest = config.dataset.resolved_synthetic_manifest();
  if (!synth_manifest.empty()) {
    DatasetSnapshot synth = load_manifest(synth_manifest);
    synthetic_pairs = load_split_pairs(synth, Split::kTrain, config.dataset);
  }

  const std::filesystem::path out_dir = config.train.runs_dir / config.experiment_name;
  write_config_echo(config, out_dir);

  std::vector<RunRecord> runs;
  if (config.model.architecture == Architecture::kHeterogeneous) {
    if (config.donor_checkpoint.empty()) {
      throw ConfigError(
          "heterogeneous training needs train.donor_checkpoint (the Siamese epoch " +
          std::to_string(config.train.donor_epoch) + " checkpoint)");
    }
    runs = train_heterogeneous(config.model, config.train, config.loss, config.augment,
                               train_pairs, val_pairs, config.donor_checkpoint, synthetic_pairs);
  } else {
    runs = train(config.model, config.train, config.loss, config.augment, train_pairs, val_pairs,
                 synthetic_pairs);
  }

  BestSelection best = select_best(runs);
  nlohmann::json summary;
  summary["experiment"] = config.experiment_name;
  summary["best_seed"] = best.seed;
  summary["best_epoch"] = best.epoch;
  summary["best_checkpoint"] = best.checkpoint.string();
  summary["val_A@1"] = best.metrics.a1;
  summary["val_A@5"] = best.metrics.a5;
  summary["val_A@10"] = best.metrics.a10;
  std::ofstream(out_dir / "summary.json") << summary.dump(2) << "\n";

  std::cout << "best run: seed " << best.seed << " epoch " << best.epoch << " val A@1/5/10 = "
            << best.metrics.a1 << "/" << best.metrics.a5 << "/" << best.metrics.a10 << "\n"
            << "checkpoint: " << best.checkpoint.string() << "\n";
  return 0;
}

int eval_checkpoint(const RunConfig& config, const std::filesystem::path& checkpoint_path,
                    bool quiet = false) {
  DatasetSnapshot snapshot = load_manifest(config.dataset.resolved_manifest());
  LoadedCheckpoint loaded = load_checkpoint(checkpoint_path);
  const CrossModalModel& model = loaded.model;
  if (model.config().n_points != config.dataset.n_points) {
    throw ConfigError("checkpoint expects n_points=" +
                      std::to_string(model.config().n_points) + ", config asks for " +
                      std::to_string(config.dataset.n_points));
  }

  const std::filesystem::path report_dir = config.eval.report_dir;
  std::filesystem::create_directories(report_dir);
  write_config_echo(config, report_dir);

  // Reuse a persisted gallery index when it matches this checkpoint.
  GalleryIndex index;
  const std::filesystem::path index_path = config.eval.gallery_index.empty()
                                               ? report_dir / "gallery.idx"
                                               : config.eval.gallery_index;
  const std::uint64_t fingerprint = model_fingerprint(model);
  bool built = false;
  if (std::filesystem::exists(index_path)) {
    try {
      index = load_gallery_index(index_path, fingerprint);
    } catch (const EvaluationError&) {
      built = true;  // stale or unreadable: rebuild below
    }
  } else {
    built = true;
  }
  if (built) {
    index = build_gallery(model, load_gallery_clouds(snapshot, config.dataset));
    save_gallery_index(index, index_path);
  }

  auto test_pairs = load_split_pairs(snapshot, Split::kTest, config.dataset);
  if (test_pairs.empty()) throw ConfigError("eval: manifest has no test records");

  const int k = std::min<int>(10, static_cast<int>(index.shape_ids.size()));
  std::vector<RetrievalResult> results;
  for (const auto& pair : test_pairs) {
    nn::Vector q = model.encode(pair.sketch, Modality::kSketch);
    results.push_back(retrieve(index, q, k, pair.pair_id));
  }
  auto gt = ground_truth_of(test_pairs);
  AccuracyReport summary = accuracy_summary(results, gt);
  std::vector<GroupReportRow> rows = per_group_report(results, snapshot, gt);

  save_group_report_csv(rows, report_dir / "report.csv");
  std::ofstream(report_dir / "report.txt") << format_group_report(rows);

  nlohmann::json js;
  js["checkpoint"] = checkpoint_path.string();
  js["gallery_size"] = index.shape_ids.size();
  js["A@1"] = summary.a1;
  js["A@5"] = summary.a5;
  js["A@10"] = summary.a10;
  std::ofstream(report_dir / "summary.json") << js.dump(2) << "\n";

  if (!quiet) {
    std::cout << "gallery " << index.shape_ids.size() << ", " << results.size()
              << " queries\n"
              << format_group_report(rows);
  }
  return 0;
}

int cmd_eval(const CommonFlags& flags, const std::string& checkpoint_arg) {
  RunConfig config = config_from_flags(flags);
  if (flags.explain) {
    std::cout << config.resolved_text();
    return 0;
  }
  std::filesystem::path ckpt =
      checkpoint_arg.empty() ? config.eval.checkpoint : std::filesystem::path(checkpoint_arg);
  if (ckpt.empty()) throw ConfigError("eval: no checkpoint given (eval.checkpoint or argument)");
  return eval_checkpoint(config, ckpt);
}

// Rebuilds RunRecords from the metrics logs under runs_dir/<experiment>.
std::vector<RunRecord> collect_runs(const std::filesystem::path& experiment_dir) {
  std::vector<RunRecord> runs;
  if (!std::filesystem::is_directory(experiment_dir)) {
    throw ConfigError("report: no experiment directory: " + experiment_dir.string());
  }
  std::vector<std::filesystem::path> seed_dirs;
  for (const auto& entry : std::filesystem::directory_iterator(experiment_dir)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "metrics.jsonl")) {
      seed_dirs.push_back(entry.path());
    }
  }
  std::sort(seed_dirs.begin(), seed_dirs.end());
  for (const auto& dir : seed_dirs) {
    RunRecord record;
    std::ifstream in(dir / "metrics.jsonl");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line);
      record.seed = j.at("seed").get<std::uint64_t>();
      ValidationPoint v;
      v.epoch = j.at("epoch").get<int>();
      v.metrics.a1 = j.at("A@1").get<double>();
      v.metrics.a5 = j.at("A@5").get<double>();
      v.metrics.a10 = j.at("A@10").get<double>();
      v.checkpoint = dir / ("epoch_" + std::to_string(v.epoch) + ".ckpt");
      record.validations.push_back(std::move(v));
      record.epoch_losses.push_back(j.at("loss").is_number() ? j.at("loss").get<double>() : 0.0);
    }
    if (!record.validations.empty()) runs.push_back(std::move(record));
  }
  if (runs.empty()) {
    throw ConfigError("report: no completed runs under " + experiment_dir.string());
  }
  return runs;
}

int cmd_report(const CommonFlags& flags, const std::string& runs_dir_arg) {
  RunConfig config = config_from_flags(flags);
  if (flags.explain) {
    std::cout << config.resolved_text();
    return 0;
  }
  std::filesystem::path experiment_dir =
      runs_dir_arg.empty() ? config.train.runs_dir / config.experiment_name
                           : std::filesystem::path(runs_dir_arg);
  std::vector<RunRecord> runs = collect_runs(experiment_dir);
  BestSelection best = select_best(runs);
  std::cout << "runs: " << runs.size() << "\n";
  for (const auto& run : runs) {
    const ValidationPoint* peak = &run.validations.front();
    for (const auto& v : run.validations) {
      if (v.metrics.a1 > peak->metrics.a1) peak = &v;
    }
    std::cout << "  seed " << run.seed << ": peak A@1 " << peak->metrics.a1 << " at epoch "
              << peak->epoch << "\n";
  }
  std::cout << "best: seed " << best.seed << " epoch " << best.epoch << " A@1/5/10 = "
            << best.metrics.a1 << "/" << best.metrics.a5 << "/" << best.metrics.a10 << "\n"
            << "checkpoint: " << best.checkpoint.string() << "\n";
  return 0;
}

int cmd_size_sweep(const CommonFlags& flags, std::vector<double> fractions,
                   const std::string& out_path) {
  RunConfig base = config_from_flags(flags);
  if (flags.explain) {
    std::cout << base.resolved_text();
    return 0;
  }
  if (fractions.empty()) throw ConfigError("size-sweep: no fractions given");
  std::sort(fractions.begin(), fractions.end());
  fractions.erase(std::unique(fractions.begin(), fractions.end()), fractions.end());
  for (double f : fractions) {
    if (f <= 0.0 || f > 1.0) throw ConfigError("size-sweep: fractions must lie in (0, 1]");
  }

  DatasetSnapshot snapshot = load_manifest(base.dataset.resolved_manifest());
  auto train_pairs = load_split_pairs(snapshot, Split::kTrain, base.dataset);
  auto val_pairs = load_split_pairs(snapshot, Split::kVal, base.dataset);
  auto test_pairs = load_split_pairs(snapshot, Split::kTest, base.dataset);

  std::filesystem::path csv_path =
      out_path.empty() ? (base.train.runs_dir / (base.experiment_name + "_size_sweep.csv"))
                       : std::filesystem::path(out_path);
  if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
  std::ofstream csv(csv_path);
  csv << "fraction,subset_size,best_seed,best_epoch,val_A@1,test_A@1,test_A@5,test_A@10\n";

  for (double fraction : fractions) {
    const auto subset =
        static_cast<long long>(std::llround(fraction * static_cast<double>(train_pairs.size())));
    if (subset < base.train.batch_size) {
      log_warn("size-sweep: fraction " + std::to_string(fraction) + " yields " +
               std::to_string(subset) + " pairs, less than one batch; skipped");
      continue;
    }
    RunConfig config = base;
    config.train.train_fraction = fraction;
    config.train.experiment_name =
        base.experiment_name + "_f" + std::to_string(static_cast<int>(fraction * 100));
    write_config_echo(config, config.train.runs_dir / config.train.experiment_name);

    std::vector<RunRecord> runs = train(config.model, config.train, config.loss, config.augment,
                                        train_pairs, val_pairs);
    BestSelection best = select_best(runs);

    std::string test_cols = ",,";
    if (!test_pairs.empty()) {
      LoadedCheckpoint loaded = load_checkpoint(best.checkpoint);
      GalleryIndex index =
          build_gallery(loaded.model, load_gallery_clouds(snapshot, config.dataset));
      const int k = std::min<int>(10, static_cast<int>(index.shape_ids.size()));
      std::vector<RetrievalResult> results;
      for (const auto& pair : test_pairs) {
        results.push_back(
            retrieve(index, loaded.model.encode(pair.sketch, Modality::kSketch), k, pair.pair_id));
      }
      AccuracyReport test = accuracy_summary(results, ground_truth_of(test_pairs));
      test_cols = std::to_string(test.a1) + "," + std::to_string(test.a5) + "," +
                  std::to_string(test.a10);
    }
    csv << fraction << "," << subset << "," << best.seed << "," << best.epoch << ","
        << best.metrics.a1 << "," << test_cols << "\n";
    std::cout << "fraction " << fraction << ": subset " << subset << ", best val A@1 "
              << best.metrics.a1 << "\n";
  }
  std::cout << "sweep written to " << csv_path.string() << "\n";
  return 0;
}

// Maps the documented source layout onto the manifest schema:
//   <root>/sketches/<participant>/<shape_id>.json|.xyz
//   <root>/shapes/<shape_id>.obj
//   <root>/groups.csv       participant_id,group       (optional, default A)
//   <root>/alignments.csv   participant_id,shape_id,rx,ry,rz (optional)
// Shapes without sketches become gallery_only rows; all sketch rows start in
// the train split, to be re-split with the `split` command.
int cmd_convert(const std::string& root_arg, const std::string& out_arg, bool synthetic) {
  const std::filesystem::path root = root_arg;
  if (!std::filesystem::is_directory(root / "sketches") ||
      !std::filesystem::is_directory(root / "shapes")) {
    throw ConfigError("convert: expected <root>/sketches/ and <root>/shapes/ directories");
  }

  std::map<std::string, ParticipantGroup> groups;
  if (std::filesystem::exists(root / "groups.csv")) {
    std::ifstream in(root / "groups.csv");
    std::string line;
    while (std::getline(in, line)) {
      auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      groups[line.substr(0, comma)] =
          line.substr(comma + 1) == "B" ? ParticipantGroup::kB : ParticipantGroup::kA;
    }
  }
  std::map<std::pair<std::string, std::string>, Eigen::Vector3d> alignments;
  if (std::filesystem::exists(root / "alignments.csv")) {
    std::ifstream in(root / "alignments.csv");
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string participant, shape, rx, ry, rz;
      if (std::getline(ls, participant, ',') && std::getline(ls, shape, ',') &&
          std::getline(ls, rx, ',') && std::getline(ls, ry, ',') && std::getline(ls, rz)) {
        try {
          alignments[{participant, shape}] =
              Eigen::Vector3d(std::stod(rx), std::stod(ry), std::stod(rz));
        } catch (...) {
          // header or malformed row; ignored
        }
      }
    }
  }

  std::map<std::string, std::filesystem::path> shapes;
  for (const auto& entry : std::filesystem::directory_iterator(root / "shapes")) {
    if (entry.path().extension() == ".obj") shapes[entry.path().stem().string()] = entry.path();
  }

  DatasetSnapshot snapshot;
  std::set<std::string> sketched;
  for (const auto& participant_dir : std::filesystem::directory_iterator(root / "sketches")) {
    if (!participant_dir.is_directory()) continue;
    const std::string participant = participant_dir.path().filename().string();
    for (const auto& entry : std::filesystem::directory_iterator(participant_dir.path())) {
      auto ext = entry.path().extension().string();
      if (ext != ".json" && ext != ".xyz" && ext != ".txt") continue;
      const std::string shape_id = entry.path().stem().string();
      auto shape_it = shapes.find(shape_id);
      if (shape_it == shapes.end()) {
        log_warn("convert: sketch " + entry.path().string() + " has no shape " + shape_id);
        continue;
      }
      ManifestRecord r;
      r.pair_id = participant + "_" + shape_id;
      r.participant_id = participant;
      auto group_it = groups.find(participant);
      r.group = group_it == groups.end() ? ParticipantGroup::kA : group_it->second;
      r.split = Split::kTrain;
      r.sketch_path = entry.path();
      r.shape_path = shape_it->second;
      r.is_synthetic = synthetic;
      auto fix = alignments.find({participant, shape_id});
      if (fix != alignments.end()) r.alignment_fix = fix->second;
      r.shape_id = shape_id;
      snapshot.records.push_back(std::move(r));
      sketched.insert(shape_id);
    }
  }
  for (const auto& [shape_id, path] : shapes) {
    if (sketched.count(shape_id)) continue;
    ManifestRecord r;
    r.pair_id = "gallery_" + shape_id;
    r.participant_id = "gallery";
    r.split = Split::kGalleryOnly;
    r.shape_path = path;
    r.shape_id = shape_id;
    snapshot.records.push_back(std::move(r));
  }

  const std::filesystem::path out =
      out_arg.empty() ? root / "manifest.csv" : std::filesystem::path(out_arg);
  save_manifest(snapshot, out);
  std::cout << "manifest with " << snapshot.records.size() << " rows written to " << out.string()
            << "\n";
  return 0;
}

}  // namespace

std::vector<TrainingPair> load_split_pairs(const DatasetSnapshot& snapshot, Split split,
                                           const DatasetConfig& dataset) {
  std::vector<TrainingPair> pairs;
  for (const ManifestRecord& record : snapshot.records) {
    if (record.split != split) continue;
    TrainingPair pair;
    pair.pair_id = record.pair_id;
    pair.shape_id = record.shape_id;
    pair.sketch = load_cached_or(sketch_cache_path(dataset, record), [&] {
      return load_pair(record, dataset.n_points).first;
    });
    pair.shape = load_cached_or(shape_cache_path(dataset, record), [&] {
      return load_shape_cloud(record, dataset.n_points);
    });
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::vector<std::pair<std::string, PointCloud>> load_gallery_clouds(
    const DatasetSnapshot& snapshot, const DatasetConfig& dataset) {
  std::set<std::string> gallery(snapshot.gallery_ids.begin(), snapshot.gallery_ids.end());
  std::vector<std::pair<std::string, PointCloud>> clouds;
  std::set<std::string> done;
  for (const ManifestRecord& record : snapshot.records) {
    if (!gallery.count(record.shape_id) || done.count(record.shape_id)) continue;
    clouds.push_back({record.shape_id, load_cached_or(shape_cache_path(dataset, record), [&] {
                        return load_shape_cloud(record, dataset.n_points);
                      })});
    done.insert(record.shape_id);
  }
  return clouds;
}

PrepareStats prepare_cache(const DatasetSnapshot& snapshot, const DatasetConfig& dataset) {
  PrepareStats stats;
  std::filesystem::create_directories(cache_subdir(dataset));
  std::set<std::string> shapes_done;
  for (const ManifestRecord& record : snapshot.records) {
    if (record.split != Split::kGalleryOnly) {
      const auto sketch_path = sketch_cache_path(dataset, record);
      if (std::filesystem::exists(sketch_path)) {
        ++stats.skipped;
      } else {
        try {
          save_cloud_text(load_pair(record, dataset.n_points).first, sketch_path);
          ++stats.written;
        } catch (const std::exception& e) {
          stats.failures.push_back(record.sketch_path.string() + ": " + e.what());
        }
      }
    }
    if (!shapes_done.insert(record.shape_id).second) continue;
    const auto shape_path = shape_cache_path(dataset, record);
    if (std::filesystem::exists(shape_path)) {
      ++stats.skipped;
      continue;
    }
    try {
      save_cloud_text(load_shape_cloud(record, dataset.n_points), shape_path);
      ++stats.written;
    } catch (const std::exception& e) {
      stats.failures.push_back(record.shape_path.string() + ": " + e.what());
    }
  }
  return stats;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Cross-modal retrieval pipeline for 3D VR sketches and shapes"};
  app.require_subcommand(0, 1);

  bool list_presets = false;
  app.add_flag("--list-presets", list_presets, "List experiment presets and exit");

  CommonFlags prepare_flags, split_flags, train_flags, eval_flags, report_flags, sweep_flags;
  std::string split_out = "manifest_split.csv";
  std::string eval_checkpoint_arg;
  std::string report_dir_arg;
  std::vector<double> sweep_fractions;
  std::string sweep_out;
  std::string convert_root, convert_out;
  bool convert_synthetic = false;

  CLI::App* prepare = app.add_subcommand("prepare", "Sample and cache normalized point clouds");
  add_common_flags(prepare, prepare_flags);

  CLI::App* split = app.add_subcommand("split", "Assign train/val/test splits to a manifest");
  add_common_flags(split, split_flags);
  split->add_option("--out", split_out, "Output manifest path");

  CLI::App* train = app.add_subcommand("train", "Train a model per the run configuration");
  add_common_flags(train, train_flags);

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the test protocol");
  add_common_flags(eval, eval_flags);
  eval->add_option("checkpoint", eval_checkpoint_arg, "Checkpoint file");

  CLI::App* report = app.add_subcommand("report", "Aggregate runs and select the best");
  add_common_flags(report, report_flags);
  report->add_option("runs_dir", report_dir_arg, "Experiment directory (runs/<experiment>)");

  CLI::App* sweep = app.add_subcommand("size-sweep", "Accuracy vs. training-set fraction");
  add_common_flags(sweep, sweep_flags);
  sweep->add_option("--fractions", sweep_fractions, "Fractions in (0, 1]")->required();
  sweep->add_option("--out", sweep_out, "Output CSV path");

  CLI::App* convert = app.add_subcommand("convert", "Map a source data layout onto a manifest");
  convert->add_option("root", convert_root, "Dataset root directory")->required();
  convert->add_option("--out", convert_out, "Output manifest path");
  convert->add_flag("--synthetic", convert_synthetic, "Mark converted sketches as synthetic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (list_presets) {
      for (const auto& name : preset_names()) std::cout << name << "\n";
      return 0;
    }
    if (prepare->parsed()) return cmd_prepare(prepare_flags);
    if (split->parsed()) return cmd_split(split_flags, split_out);
    if (train->parsed()) return cmd_train(train_flags);
    if (eval->parsed()) return cmd_eval(eval_flags, eval_checkpoint_arg);
    if (report->parsed()) return cmd_report(report_flags, report_dir_arg);
    if (sweep->parsed()) return cmd_size_sweep(sweep_flags, sweep_fractions, sweep_out);
    if (convert->parsed()) return cmd_convert(convert_root, convert_out, convert_synthetic);
    std::cout << app.help();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const ArgumentError& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("vrsketch");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace vrsketch
