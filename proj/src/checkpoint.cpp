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

#include "vrsketch/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "vrsketch/errors.hpp"
#include "vrsketch/rng.hpp"

namespace vrsketch {

namespace {

constexpr char kMagic[8] = {'V', 'R', 'S', 'K', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

nlohmann::json model_config_to_json(const ModelConfig& config) {
  nlohmann::json j;
  j["family"] = encoder_family_name(config.family);
  j["architecture"] = architecture_name(config.architecture);
  j["embedding_dim"] = config.embedding_dim;
  j["n_points"] = config.n_points;
  j["sa_levels"] = nlohmann::json::array();
  for (const auto& level : config.sa_levels) {
    j["sa_levels"].push_back({{"centroids", level.centroids},
                              {"radius", level.radius},
                              {"neighbors", level.neighbors},
                              {"widths", level.widths}});
  }
  j["sa_global_widths"] = config.sa_global_widths;
  j["dg_neighbors"] = config.dg_neighbors;
  j["dg_widths"] = config.dg_widths;
  j["dg_global_width"] = config.dg_global_width;
  j["head_hidden"] = config.head_hidden;
  return j;
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig config;
  config.family = parse_encoder_family(j.at("family").get<std::string>());
  config.architecture = parse_architecture(j.at("architecture").get<std::string>());
  config.embedding_dim = j.at("embedding_dim").get<int>();
  config.n_points = j.at("n_points").get<int>();
  config.sa_levels.clear();
  for (const auto& jl : j.at("sa_levels")) {
    SetAbstractionLevel level;
    level.centroids = jl.at("centroids").get<int>();
    level.radius = jl.at("radius").get<double>();
    level.neighbors = jl.at("neighbors").get<int>();
    level.widths = jl.at("widths").get<std::vector<int>>();
    config.sa_levels.push_back(level);
  }
  config.sa_global_widths = j.at("sa_global_widths").get<std::vector<int>>();
  config.dg_neighbors = j.at("dg_neighbors").get<int>();
  config.dg_widths = j.at("dg_widths").get<std::vector<int>>();
  config.dg_global_width = j.at("dg_global_width").get<int>();
  config.head_hidden = j.at("head_hidden").get<std::vector<int>>();
  return config;
}

std::uint64_t model_fingerprint(const CrossModalModel& model) {
  std::uint64_t h = fnv1a64(architecture_name(model.config().architecture));
  for (const PointEncoder* branch : model.branches()) {
    h = combine_seed(h, branch->params().fingerprint());
  }
  return h;
}

void save_checkpoint(const std::filesystem::path& path, const CrossModalModel& model, int epoch,
                     const std::map<std::string, std::string>& rng_states) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint: " + path.string());

  nlohmann::json header;
  header["config"] = model_config_to_json(model.config());
  header["epoch"] = epoch;
  header["rng_states"] = rng_states;
  header["tensors"] = nlohmann::json::array();

  auto branches = model.branches();
  auto names = CrossModalModel::branch_names(model.config().architecture);
  for (std::size_t b = 0; b < branches.size(); ++b) {
    for (const auto& t : branches[b]->params().tensors()) {
      header["tensors"].push_back({{"branch", names[b]},
                                   {"name", t.name},
                                   {"rows", t.value.rows()},
                                   {"cols", t.value.cols()}});
    }
  }

  std::string header_str = header.dump();
  out.write(kMagic, 8);
  write_u64(out, kVersion);
  write_u64(out, header_str.size());
  out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
  for (const PointEncoder* branch : branches) {
    for (const auto& t : branch->params().tensors()) {
      out.write(reinterpret_cast<const char*>(t.value.data()),
                static_cast<std::streamsize>(sizeof(double) * t.value.size()));
    }
  }
  if (!out) throw CheckpointError("failed writing checkpoint: " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint not found: " + path.string());

  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) {
    throw CheckpointError("not a checkpoint file: " + path.string());
  }
  std::uint64_t version = read_u64(in);
  if (version != kVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version) + ": " +
                          path.string());
  }
  std::uint64_t header_len = read_u64(in);
  std::string header_str(header_len, '\0');
  in.read(header_str.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw CheckpointError("truncated checkpoint header: " + path.string());

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_str);
  } catch (const nlohmann::json::parse_error& e) {
    throw CheckpointError("corrupt checkpoint header: " + path.string() + ": " + e.what());
  }

  LoadedCheckpoint loaded{CrossModalModel::create(model_config_from_json(header.at("config")), 0),
                          header.at("epoch").get<int>(),
                          {}};
  if (header.contains("rng_states")) {
    loaded.rng_states = header.at("rng_states").get<std::map<std::string, std::string>>();
  }

  auto branches = loaded.model.branches();
  auto names = CrossModalModel::branch_names(loaded.model.config().architecture);
  for (const auto& jt : header.at("tensors")) {
    const std::string branch_name = jt.at("branch").get<std::string>();
    const std::string tensor_name = jt.at("name").get<std::string>();
    const auto rows = jt.at("rows").get<Eigen::Index>();
    const auto cols = jt.at("cols").get<Eigen::Index>();

    std::size_t b = 0;
    while (b < names.size() && names[b] != branch_name) ++b;
    if (b == names.size()) {
      throw CheckpointError("checkpoint branch '" + branch_name +
                            "' does not match model architecture: " + path.string());
    }
    int handle = branches[b]->params().find(tensor_name);
    if (handle < 0) {
      throw CheckpointError("checkpoint tensor '" + tensor_name +
                            "' unknown to this model config: " + path.string());
    }
    nn::Matrix& dst = branches[b]->params().value(handle);
    if (dst.rows() != rows || dst.cols() != cols) {
      throw CheckpointError("checkpoint tensor '" + tensor_name +
                            "' shape mismatch: " + path.string());
    }
    in.read(reinterpret_cast<char*>(dst.data()),
            static_cast<std::streamsize>(sizeof(double) * dst.size()));
    if (!in) throw CheckpointError("truncated checkpoint tensors: " + path.string());
  }
  return loaded;
}

CrossModalModel clone_checkpoint_for_heterogeneous(const std::filesystem::path& donor_path,
                                                   const ModelConfig* expected) {
  LoadedCheckpoint donor = load_checkpoint(donor_path);
  if (donor.model.config().architecture != Architecture::kSiamese) {
    throw CheckpointError("heterogeneous initialization requires a Siamese donor: " +
                          donor_path.string());
  }
  if (expected) {
    ModelConfig want = *expected;
    want.architecture = Architecture::kSiamese;
    if (!(want == donor.model.config())) {
      throw CheckpointError("donor checkpoint config does not match the requested model: " +
                            donor_path.string());
    }
  }
  return CrossModalModel::clone_for_heterogeneous(donor.model);
}

}  // namespace vrsketch
