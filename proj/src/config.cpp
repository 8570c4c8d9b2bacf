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

#include "vrsketch/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vrsketch/errors.hpp"

namespace vrsketch {

namespace {

// Every accepted "section.key". Anything else is rejected.
const std::vector<std::string> kKnownKeys = {
    "experiment_name",
    "preset",
    "dataset.manifest",
    "dataset.synthetic_manifest",
    "dataset.data_root",
    "dataset.manifest_name",
    "dataset.synthetic_manifest_name",
    "dataset.n_points",
    "dataset.cache_dir",
    "dataset.heldout_participants",
    "dataset.split_seed",
    "model.encoder",
    "model.architecture",
    "model.embedding_dim",
    "model.sa_levels",
    "model.sa_global_widths",
    "model.dg_neighbors",
    "model.dg_widths",
    "model.dg_global_width",
    "model.head_hidden",
    "loss.kind",
    "loss.margin",
    "loss.temperature",
    "loss.denominator",
    "loss.negative_mode",
    "loss.mean_over_anchors",
    "train.epochs",
    "train.batch_size",
    "train.optimizer",
    "train.learning_rate",
    "train.weight_decay",
    "train.seeds",
    "train.validation_every",
    "train.deterministic",
    "train.n_threads",
    "train.donor_epoch",
    "train.donor_checkpoint",
    "train.runs_dir",
    "train.train_fraction",
    "augment.rotation_enabled",
    "augment.rotation_axis",
    "augment.scale_enabled",
    "augment.scale_lo",
    "augment.scale_hi",
    "augment.renormalize_after",
    "augment.synthetic_ratio",
    "augment.augment_shapes",
    "eval.checkpoint",
    "eval.report_dir",
    "eval.gallery_index",
};

struct KeyValueStore {
  std::map<std::string, std::string> values;

  void set(const std::string& key, const std::string& value) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
      throw ConfigError("unknown configuration key: " + key);
    }
    values[key] = value;
  }

  bool has(const std::string& key) const { return values.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback = {}) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void parse_config_file(const std::filesystem::path& path, KeyValueStore& store) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": empty key");
    }
    store.set(section.empty() ? key : section + "." + key, value);
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    int out = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (...) {
    throw ConfigError("bad integer for " + key + ": '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (...) {
    throw ConfigError("bad number for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("bad boolean for " + key + ": '" + v + "' (use true/false)");
}

std::vector<std::string> split_list(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& item : split_list(v, '-')) out.push_back(to_int(key, item));
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

// "512:0.2:32:64-64-128 / 128:0.4:64:128-128-256"
std::vector<SetAbstractionLevel> to_sa_levels(const std::string& key, const std::string& v) {
  std::vector<SetAbstractionLevel> levels;
  for (const auto& part : split_list(v, '/')) {
    auto fields = split_list(part, ':');
    if (fields.size() != 4) {
      throw ConfigError(key + ": level must be centroids:radius:k:w-w-w, got '" + part + "'");
    }
    SetAbstractionLevel level;
    level.centroids = to_int(key, fields[0]);
    level.radius = to_double(key, fields[1]);
    level.neighbors = to_int(key, fields[2]);
    level.widths = to_int_list(key, fields[3]);
    levels.push_back(level);
  }
  if (levels.empty()) throw ConfigError(key + ": no levels");
  return levels;
}

int axis_from_name(const std::string& v) {
  if (v == "x" || v == "0") return 0;
  if (v == "y" || v == "1") return 1;
  if (v == "z" || v == "2") return 2;
  throw ConfigError("bad rotation axis: '" + v + "' (use x, y or z)");
}

struct Preset {
  const char* name;
  std::vector<std::pair<std::string, std::string>> overrides;
};

// Experiment rows of the evaluation tables, plus the synthetic-mix study.
// "aligned" rows point at the manifest variant with alignment fixes
// populated; synthetic rows point at the corresponding precomputed pools.
const std::vector<Preset>& preset_table() {
  static const std::vector<Preset> presets = {
      {"exp01",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest.csv"}}},
      {"exp02",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "heterogeneous"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest.csv"}}},
      {"exp03a",
       {{"model.encoder", "dynamic_graph"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest.csv"}}},
      {"exp03b",
       {{"model.encoder", "dynamic_graph"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "24"},
        {"dataset.manifest_name", "manifest.csv"}}},
      {"exp04",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest_aligned.csv"}}},
      {"exp05",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "heterogeneous"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest_aligned.csv"}}},
      {"exp06",
       {{"model.encoder", "dynamic_graph"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest_aligned.csv"}}},
      {"exp07",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "contrastive"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest.csv"}}},
      {"exp08",
       {{"model.encoder", "dynamic_graph"},
        {"model.architecture", "siamese"},
        {"loss.kind", "contrastive"},
        {"train.batch_size", "24"},
        {"dataset.manifest_name", "manifest.csv"}}},
      {"exp09",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest_ss_modelnet.csv"}}},
      {"exp10",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest_cn_shapenet.csv"}}},
      {"exp11",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest_ss_shapenet.csv"}}},
      {"exp12",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest.csv"},
        {"dataset.synthetic_manifest_name", "manifest_ss_modelnet.csv"},
        {"augment.synthetic_ratio", "1.0"}}},
      {"exp13",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest_aligned.csv"},
        {"dataset.synthetic_manifest_name", "manifest_ss_modelnet.csv"},
        {"augment.synthetic_ratio", "1.0"}}},
      {"exp14",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest.csv"},
        {"augment.scale_enabled", "true"}}},
      {"exp15",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest.csv"},
        {"augment.rotation_enabled", "true"}}},
      {"exp16",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest.csv"},
        {"dataset.synthetic_manifest_name", "manifest_style_groupb.csv"},
        {"augment.synthetic_ratio", "0.518"}}},
      {"exp17",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest.csv"},
        {"dataset.synthetic_manifest_name", "manifest_ss_shapenet_extra.csv"},
        {"augment.synthetic_ratio", "0.518"}}},
      // Synthetic-mix study at 40% of the human training set. The ratios land
      // on 140/280/421/561/702 synthetic sketches for 281 human ones.
      {"t5_hs281",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest.csv"},
        {"train.train_fraction", "0.4"}}},
      {"t5_ss140",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest.csv"},
        {"dataset.synthetic_manifest_name", "manifest_ss_modelnet.csv"},
        {"train.train_fraction", "0.4"},
        {"augment.synthetic_ratio", "0.499"}}},
      {"t5_ss280",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest.csv"},
        {"dataset.synthetic_manifest_name", "manifest_ss_modelnet.csv"},
        {"train.train_fraction", "0.4"},
        {"augment.synthetic_ratio", "0.997"}}},
      {"t5_ss421",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest.csv"},
        {"dataset.synthetic_manifest_name", "manifest_ss_modelnet.csv"},
        {"train.train_fraction", "0.4"},
        {"augment.synthetic_ratio", "1.5"}}},
      {"t5_ss561",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest.csv"},
        {"dataset.synthetic_manifest_name", "manifest_ss_modelnet.csv"},
        {"train.train_fraction", "0.4"},
        {"augment.synthetic_ratio", "1.997"}}},
      {"t5_ss702",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest.csv"},
        {"dataset.synthetic_manifest_name", "manifest_ss_modelnet.csv"},
        {"train.train_fraction", "0.4"},
        {"augment.synthetic_ratio", "2.499"}}},
      {"t5_distort",
       {{"model.encoder", "set_abstraction"},
        {"model.architecture", "siamese"},
        {"loss.kind", "triplet"},
        {"train.batch_size", "6"},
        {"dataset.manifest_name", "manifest.csv"},
        {"train.train_fraction", "0.4"},
        {"augment.scale_enabled", "true"}}},
  };
  return presets;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : preset_table()) names.push_back(p.name);
  return names;
}

std::vector<std::pair<std::string, std::string>> preset_overrides(const std::string& name) {
  for (const auto& p : preset_table()) {
    if (name == p.name) return p.overrides;
  }
  throw ConfigError("unknown preset: " + name);
}

std::filesystem::path DatasetConfig::resolved_manifest() const {
  if (!manifest.empty()) return manifest;
  return std::filesystem::path(data_root) / manifest_name;
}

std::filesystem::path DatasetConfig::resolved_synthetic_manifest() const {
  if (!synthetic_manifest.empty()) return synthetic_manifest;
  if (synthetic_manifest_name.empty()) return {};
  return std::filesystem::path(data_root) / synthetic_manifest_name;
}

std::filesystem::path DatasetConfig::resolved_cache_dir() const {
  if (!cache_dir.empty()) return cache_dir;
  if (const char* env = std::getenv("VRSKETCH_CACHE_ROOT")) return env;
  return std::filesystem::path(data_root) / "cache";
}

RunConfig resolve_run_config(const std::optional<std::filesystem::path>& config_file,
                             const std::string& preset_flag,
                             const std::vector<std::pair<std::string, std::string>>& overrides) {
  KeyValueStore store;
  if (config_file) parse_config_file(*config_file, store);

  std::string preset = preset_flag.empty() ? store.get("preset") : preset_flag;
  if (!preset.empty()) {
    for (const auto& [key, value] : preset_overrides(preset)) store.set(key, value);
    store.set("preset", preset);
  }
  for (const auto& [key, value] : overrides) store.set(key, value);

  RunConfig config;
  config.experiment_name =
      store.get("experiment_name", preset.empty() ? "default" : preset);
  config.preset = preset;

  // dataset
  auto& ds = config.dataset;
  if (store.has("dataset.manifest")) ds.manifest = store.get("dataset.manifest");
  if (store.has("dataset.synthetic_manifest")) {
    ds.synthetic_manifest = store.get("dataset.synthetic_manifest");
  }
  ds.data_root = store.get("dataset.data_root", ds.data_root);
  ds.manifest_name = store.get("dataset.manifest_name", ds.manifest_name);
  ds.synthetic_manifest_name =
      store.get("dataset.synthetic_manifest_name", ds.synthetic_manifest_name);
  if (store.has("dataset.n_points")) {
    ds.n_points = to_int("dataset.n_points", store.get("dataset.n_points"));
  }
  if (store.has("dataset.cache_dir")) ds.cache_dir = store.get("dataset.cache_dir");
  if (store.has("dataset.heldout_participants")) {
    ds.heldout_participants = split_list(store.get("dataset.heldout_participants"), ';');
  }
  if (store.has("dataset.split_seed")) {
    ds.split_seed =
        static_cast<std::uint64_t>(to_int("dataset.split_seed", store.get("dataset.split_seed")));
  }

  // model
  auto& m = config.model;
  if (store.has("model.encoder")) m.family = parse_encoder_family(store.get("model.encoder"));
  if (store.has("model.architecture")) {
    m.architecture = parse_architecture(store.get("model.architecture"));
  }
  if (store.has("model.embedding_dim")) {
    m.embedding_dim = to_int("model.embedding_dim", store.get("model.embedding_dim"));
  }
  if (store.has("model.sa_levels")) {
    m.sa_levels = to_sa_levels("model.sa_levels", store.get("model.sa_levels"));
  }
  if (store.has("model.sa_global_widths")) {
    m.sa_global_widths = to_int_list("model.sa_global_widths", store.get("model.sa_global_widths"));
  }
  if (store.has("model.dg_neighbors")) {
    m.dg_neighbors = to_int("model.dg_neighbors", store.get("model.dg_neighbors"));
  }
  if (store.has("model.dg_widths")) {
    m.dg_widths = to_int_list("model.dg_widths", store.get("model.dg_widths"));
  }
  if (store.has("model.dg_global_width")) {
    m.dg_global_width = to_int("model.dg_global_width", store.get("model.dg_global_width"));
  }
  if (store.has("model.head_hidden")) {
    m.head_hidden = to_int_list("model.head_hidden", store.get("model.head_hidden"));
  }
  m.n_points = ds.n_points;

  // loss
  auto& l = config.loss;
  if (store.has("loss.kind")) {
    const std::string kind = store.get("loss.kind");
    if (kind == "triplet") {
      l.kind = LossKind::kTriplet;
    } else if (kind == "contrastive") {
      l.kind = LossKind::kContrastive;
    } else {
      throw ConfigError("loss.kind must be triplet or contrastive, got '" + kind + "'");
    }
  }
  if (store.has("loss.margin")) l.margin = to_double("loss.margin", store.get("loss.margin"));
  if (store.has("loss.temperature")) {
    l.temperature = to_double("loss.temperature", store.get("loss.temperature"));
  }
  if (store.has("loss.denominator")) {
    l.denominator = parse_denominator_variant(store.get("loss.denominator"));
  }
  if (store.has("loss.negative_mode")) {
    const std::string mode = store.get("loss.negative_mode");
    if (mode == "all_pairs") {
      l.negative_mode = NegativeMode::kAllPairs;
    } else if (mode == "single_random") {
      l.negative_mode = NegativeMode::kSingleRandom;
    } else {
      throw ConfigError("loss.negative_mode must be all_pairs or single_random");
    }
  }
  if (store.has("loss.mean_over_anchors")) {
    l.mean_over_anchors = to_bool("loss.mean_over_anchors", store.get("loss.mean_over_anchors"));
  }

  // train
  auto& t = config.train;
  if (store.has("train.epochs")) t.epochs = to_int("train.epochs", store.get("train.epochs"));
  if (store.has("train.batch_size")) {
    t.batch_size = to_int("train.batch_size", store.get("train.batch_size"));
  } else if (m.family == EncoderFamily::kDynamicGraph) {
    t.batch_size = 24;  // the lighter encoder affords the larger mini-batch
  }
  if (store.has("train.optimizer")) t.optimizer.kind = store.get("train.optimizer");
  if (store.has("train.learning_rate")) {
    t.optimizer.learning_rate = to_double("train.learning_rate", store.get("train.learning_rate"));
  }
  if (store.has("train.weight_decay")) {
    t.optimizer.weight_decay = to_double("train.weight_decay", store.get("train.weight_decay"));
  }
  if (store.has("train.seeds")) {
    t.seeds.clear();
    for (const auto& s : split_list(store.get("train.seeds"), ';')) {
      t.seeds.push_back(static_cast<std::uint64_t>(to_int("train.seeds", s)));
    }
    if (t.seeds.empty()) throw ConfigError("train.seeds: empty list");
  }
  if (store.has("train.validation_every")) {
    t.validation_every = to_int("train.validation_every", store.get("train.validation_every"));
  }
  if (store.has("train.deterministic")) {
    t.deterministic = to_bool("train.deterministic", store.get("train.deterministic"));
  }
  if (store.has("train.n_threads")) {
    t.n_threads = to_int("train.n_threads", store.get("train.n_threads"));
  }
  if (store.has("train.donor_epoch")) {
    t.donor_epoch = to_int("train.donor_epoch", store.get("train.donor_epoch"));
  }
  if (store.has("train.donor_checkpoint")) {
    config.donor_checkpoint = store.get("train.donor_checkpoint");
  }
  if (store.has("train.runs_dir")) t.runs_dir = store.get("train.runs_dir");
  if (store.has("train.train_fraction")) {
    t.train_fraction = to_double("train.train_fraction", store.get("train.train_fraction"));
  }
  t.experiment_name = config.experiment_name;

  // augment
  auto& a = config.augment;
  if (store.has("augment.rotation_enabled")) {
    a.rotation_enabled = to_bool("augment.rotation_enabled", store.get("augment.rotation_enabled"));
  }
  if (store.has("augment.rotation_axis")) {
    a.rotation_axis = axis_from_name(store.get("augment.rotation_axis"));
  }
  if (store.has("augment.scale_enabled")) {
    a.scale_enabled = to_bool("augment.scale_enabled", store.get("augment.scale_enabled"));
  }
  if (store.has("augment.scale_lo")) {
    a.scale_lo = to_double("augment.scale_lo", store.get("augment.scale_lo"));
  }
  if (store.has("augment.scale_hi")) {
    a.scale_hi = to_double("augment.scale_hi", store.get("augment.scale_hi"));
  }
  if (store.has("augment.renormalize_after")) {
    a.renormalize_after =
        to_bool("augment.renormalize_after", store.get("augment.renormalize_after"));
  }
  if (store.has("augment.synthetic_ratio")) {
    a.synthetic_ratio = to_double("augment.synthetic_ratio", store.get("augment.synthetic_ratio"));
  }
  if (store.has("augment.augment_shapes")) {
    a.augment_shapes = to_bool("augment.augment_shapes", store.get("augment.augment_shapes"));
  }

  // eval
  if (store.has("eval.checkpoint")) config.eval.checkpoint = store.get("eval.checkpoint");
  if (store.has("eval.report_dir")) config.eval.report_dir = store.get("eval.report_dir");
  if (store.has("eval.gallery_index")) config.eval.gallery_index = store.get("eval.gallery_index");

  a.validate();
  t.validate();
  if (l.margin <= 0.0) throw ConfigError("loss.margin must be positive");
  if (l.temperature <= 0.0) throw ConfigError("loss.temperature must be positive");
  if (ds.n_points < 1) throw ConfigError("dataset.n_points must be positive");
  if (m.embedding_dim < 1) throw ConfigError("model.embedding_dim must be positive");

  return config;
}

std::string RunConfig::resolved_text() const {
  std::ostringstream os;
  os << "experiment_name = " << experiment_name << "\n";
  if (!preset.empty()) os << "preset = " << preset << "\n";

  os << "\n[dataset]\n";
  os << "manifest = " << dataset.resolved_manifest().string() << "\n";
  auto synth = dataset.resolved_synthetic_manifest();
  if (!synth.empty()) os << "synthetic_manifest = " << synth.string() << "\n";
  os << "n_points = " << dataset.n_points << "\n";
  os << "cache_dir = " << dataset.resolved_cache_dir().string() << "\n";
  if (!dataset.heldout_participants.empty()) {
    os << "heldout_participants = ";
    for (std::size_t i = 0; i < dataset.heldout_participants.size(); ++i) {
      os << (i ? ";" : "") << dataset.heldout_participants[i];
    }
    os << "\n";
  }
  os << "split_seed = " << dataset.split_seed << "\n";

  os << "\n[model]\n";
  os << "encoder = " << encoder_family_name(model.family) << "\n";
  os << "architecture = " << architecture_name(model.architecture) << "\n";
  os << "embedding_dim = " << model.embedding_dim << "\n";
  if (model.family == EncoderFamily::kSetAbstraction) {
    os << "sa_levels = ";
    for (std::size_t i = 0; i < model.sa_levels.size(); ++i) {
      const auto& level = model.sa_levels[i];
      os << (i ? " / " : "") << level.centroids << ":" << level.radius << ":" << level.neighbors
         << ":";
      for (std::size_t j = 0; j < level.widths.size(); ++j) {
        os << (j ? "-" : "") << level.widths[j];
      }
    }
    os << "\n";
    os << "sa_global_widths = ";
    for (std::size_t j = 0; j < model.sa_global_widths.size(); ++j) {
      os << (j ? "-" : "") << model.sa_global_widths[j];
    }
    os << "\n";
  } else {
    os << "dg_neighbors = " << model.dg_neighbors << "\n";
    os << "dg_widths = ";
    for (std::size_t j = 0; j < model.dg_widths.size(); ++j) {
      os << (j ? "-" : "") << model.dg_widths[j];
    }
    os << "\n";
    os << "dg_global_width = " << model.dg_global_width << "\n";
  }
  os << "head_hidden = ";
  for (std::size_t j = 0; j < model.head_hidden.size(); ++j) {
    os << (j ? "-" : "") << model.head_hidden[j];
  }
  os << "\n";

  os << "\n[loss]\n";
  os << "kind = " << (loss.kind == LossKind::kTriplet ? "triplet" : "contrastive") << "\n";
  os << "margin = " << loss.margin << "\n";
  os << "temperature = " << loss.temperature << "\n";
  os << "denominator = " << denominator_variant_name(loss.denominator) << "\n";
  os << "negative_mode = "
     << (loss.negative_mode == NegativeMode::kAllPairs ? "all_pairs" : "single_random") << "\n";
  os << "mean_over_anchors = " << (loss.mean_over_anchors ? "true" : "false")
     << "  # reduction over anchors\n";

  os << "\n[train]\n";
  os << "epochs = " << train.epochs << "\n";
  os << "batch_size = " << train.batch_size << "\n";
  os << "optimizer = " << train.optimizer.kind << "\n";
  os << "learning_rate = " << train.optimizer.learning_rate << "\n";
  os << "weight_decay = " << train.optimizer.weight_decay << "\n";
  os << "seeds = ";
  for (std::size_t i = 0; i < train.seeds.size(); ++i) os << (i ? ";" : "") << train.seeds[i];
  os << "\n";
  os << "validation_every = " << train.validation_every << "\n";
  os << "deterministic = " << (train.deterministic ? "true" : "false") << "\n";
  os << "train_fraction = " << train.train_fraction << "\n";
  os << "donor_epoch = " << train.donor_epoch << "\n";
  if (!donor_checkpoint.empty()) os << "donor_checkpoint = " << donor_checkpoint.string() << "\n";
  os << "runs_dir = " << train.runs_dir.string() << "\n";

  os << "\n[augment]\n";
  os << "rotation_enabled = " << (augment.rotation_enabled ? "true" : "false") << "\n";
  os << "rotation_axis = " << "xyz"[augment.rotation_axis] << "\n";
  os << "scale_enabled = " << (augment.scale_enabled ? "true" : "false") << "\n";
  os << "scale_lo = " << augment.scale_lo << "\n";
  os << "scale_hi = " << augment.scale_hi << "\n";
  os << "renormalize_after = " << (augment.renormalize_after ? "true" : "false") << "\n";
  os << "synthetic_ratio = " << augment.synthetic_ratio << "\n";
  os << "augment_shapes = " << (augment.augment_shapes ? "true" : "false") << "\n";

  os << "\n[eval]\n";
  if (!eval.checkpoint.empty()) os << "checkpoint = " << eval.checkpoint.string() << "\n";
  os << "report_dir = " << eval.report_dir.string() << "\n";
  if (!eval.gallery_index.empty()) {
    os << "gallery_index = " << eval.gallery_index.string() << "\n";
  }
  return os.str();
}

}  // namespace vrsketch
