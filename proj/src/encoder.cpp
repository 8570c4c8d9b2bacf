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

#include "vrsketch/encoder.hpp"

#include <algorithm>

#include "vrsketch/errors.hpp"

namespace vrsketch {

using nn::Matrix;
using nn::Vector;

EncoderFamily parse_encoder_family(const std::string& name) {
  if (name == "set_abstraction") return EncoderFamily::kSetAbstraction;
  if (name == "dynamic_graph") return EncoderFamily::kDynamicGraph;
  throw ArgumentError("unknown encoder family: " + name);
}

std::string encoder_family_name(EncoderFamily family) {
  return family == EncoderFamily::kSetAbstraction ? "set_abstraction" : "dynamic_graph";
}

Architecture parse_architecture(const std::string& name) {
  if (name == "siamese") return Architecture::kSiamese;
  if (name == "heterogeneous") return Architecture::kHeterogeneous;
  throw ArgumentError("unknown architecture: " + name);
}

std::string architecture_name(Architecture architecture) {
  return architecture == Architecture::kSiamese ? "siamese" : "heterogeneous";
}

ModelConfig tiny_model_config(EncoderFamily family, int n_points, int embedding_dim) {
  ModelConfig config;
  config.family = family;
  config.n_points = n_points;
  config.embedding_dim = embedding_dim;
  config.sa_levels = {
      {std::max(4, n_points / 2), 0.35, 8, {16, 16}},
      {std::max(2, n_points / 4), 0.7, 8, {16, 32}},
  };
  config.sa_global_widths = {32, 32};
  config.dg_neighbors = std::min(6, n_points - 1);
  config.dg_widths = {16, 16};
  config.dg_global_width = 32;
  config.head_hidden = {24};
  return config;
}

namespace {

// ---- set abstraction -----------------------------------------------------

struct SaLevelTrace {
  std::vector<int> gather;  // M*k indices into the previous level's points
  Eigen::Index prev_cols = 0;
  Eigen::Index prev_feat_dim = 0;
  nn::MlpTrace mlp;
  Eigen::MatrixXi argmax;
};

struct SaTrace : EncoderTrace {
  std::vector<SaLevelTrace> levels;
  nn::MlpTrace global_mlp;
  Eigen::VectorXi global_argmax;
  Eigen::Index global_cols = 0;
  nn::MlpTrace head;
  Vector y;
  double prenorm_norm = 0.0;
  bool fallback = false;
};

// ---- dynamic graph ---------------------------------------------------------

struct DgLayerTrace {
  std::vector<std::vector<int>> nbrs;
  nn::MlpTrace mlp;
  Eigen::MatrixXi argmax;
};

struct DgTrace : EncoderTrace {
  std::vector<Matrix> feats;  // feats[0] = coordinates, feats[l] after layer l
  std::vector<DgLayerTrace> layers;
  nn::MlpTrace pointwise;
  Eigen::VectorXi global_argmax;
  Eigen::Index n_points = 0;
  nn::MlpTrace head;
  Vector y;
  double prenorm_norm = 0.0;
  bool fallback = false;
};

void check_forward_cloud(const PointCloud& cloud) {
  if (cloud.n_points() < 1) throw ArgumentError("encoder: empty cloud");
  if (!cloud.points.allFinite()) throw ArgumentError("encoder: non-finite cloud");
}

}  // namespace

// ---- SetAbstractionEncoder -------------------------------------------------

SetAbstractionEncoder::SetAbstractionEncoder(const ModelConfig& config, Rng& init_rng)
    : config_(config) {
  if (config_.sa_levels.empty()) throw ArgumentError("set_abstraction: no levels configured");
  int feat_dim = 0;
  for (std::size_t l = 0; l < config_.sa_levels.size(); ++l) {
    const auto& level = config_.sa_levels[l];
    if (level.centroids < 1 || level.neighbors < 1 || level.radius <= 0.0 ||
        level.widths.empty()) {
      throw ArgumentError("set_abstraction: bad level configuration");
    }
    level_mlps_.push_back(
        nn::add_mlp(params_, "sa" + std::to_string(l), 3 + feat_dim, level.widths));
    feat_dim = level.widths.back();
  }
  global_mlp_ = nn::add_mlp(params_, "sa_global", 3 + feat_dim, config_.sa_global_widths);

  std::vector<int> head_widths = config_.head_hidden;
  head_widths.push_back(config_.embedding_dim);
  head_ = nn::add_mlp(params_, "head", config_.sa_global_widths.back(), head_widths,
                      /*relu_after_last=*/false);
  nn::glorot_init(params_, init_rng);
}

Vector SetAbstractionEncoder::forward(const PointCloud& cloud,
                                      std::unique_ptr<EncoderTrace>* trace) const {
  check_forward_cloud(cloud);
  auto local = std::make_unique<SaTrace>();

  Eigen::Matrix3Xd coords = cloud.points;
  Matrix feats(0, coords.cols());

  for (std::size_t l = 0; l < config_.sa_levels.size(); ++l) {
    const auto& level = config_.sa_levels[l];
    if (level.centroids > coords.cols()) {
      throw ArgumentError("set_abstraction: fewer points than centroid count at level " +
                          std::to_string(l));
    }
    SaLevelTrace lt;
    lt.prev_cols = coords.cols();
    lt.prev_feat_dim = feats.rows();

    std::vector<int> centroid_idx = farthest_point_sample_columns(coords, level.centroids);

    const int k = level.neighbors;
    lt.gather.resize(static_cast<std::size_t>(level.centroids) * k);
    Matrix grouped(3 + feats.rows(), static_cast<Eigen::Index>(level.centroids) * k);
    for (int m = 0; m < level.centroids; ++m) {
      std::vector<int> nbrs = radius_neighbors(coords, centroid_idx[m], level.radius, k);
      for (int j = 0; j < k; ++j) {
        const int src = nbrs[j];
        const Eigen::Index c = static_cast<Eigen::Index>(m) * k + j;
        lt.gather[c] = src;
        grouped.col(c).head<3>() = coords.col(src) - coords.col(centroid_idx[m]);
        if (feats.rows() > 0) grouped.col(c).tail(feats.rows()) = feats.col(src);
      }
    }

    Matrix h = nn::mlp_forward(params_, level_mlps_[l], grouped, &lt.mlp);
    feats = nn::maxpool_groups(h, k, &lt.argmax);

    Eigen::Matrix3Xd next_coords(3, level.centroids);
    for (int m = 0; m < level.centroids; ++m) next_coords.col(m) = coords.col(centroid_idx[m]);
    coords = next_coords;
    local->levels.push_back(std::move(lt));
  }

  Matrix global_in(3 + feats.rows(), coords.cols());
  global_in.topRows(3) = coords;
  global_in.bottomRows(feats.rows()) = feats;
  local->global_cols = global_in.cols();

  Matrix g = nn::mlp_forward(params_, global_mlp_, global_in, &local->global_mlp);
  Vector pooled = nn::maxpool_all(g, &local->global_argmax);

  Matrix head_out = nn::mlp_forward(params_, head_, pooled, &local->head);
  Vector embedding = nn::l2_normalize(head_out.col(0), &local->prenorm_norm, &local->fallback);
  local->y = embedding;

  if (trace) *trace = std::move(local);
  return embedding;
}

void SetAbstractionEncoder::backward(const EncoderTrace& trace, const Vector& d_embedding,
                                     nn::GradBuffer& grads) const {
  const auto& t = dynamic_cast<const SaTrace&>(trace);

  Vector d_head_out = nn::l2_normalize_backward(t.y, t.prenorm_norm, t.fallback, d_embedding);
  Matrix d_pooled = nn::mlp_backward(params_, head_, t.head, d_head_out, grads);
  Matrix d_g = nn::maxpool_all_backward(d_pooled.col(0), t.global_argmax, t.global_cols);
  Matrix d_global_in = nn::mlp_backward(params_, global_mlp_, t.global_mlp, d_g, grads);

  // Coordinate rows are data, not parameters; only feature rows flow back.
  Matrix d_feats = d_global_in.bottomRows(d_global_in.rows() - 3);

  for (int l = static_cast<int>(config_.sa_levels.size()) - 1; l >= 0; --l) {
    const auto& level = config_.sa_levels[l];
    const auto& lt = t.levels[l];
    Matrix d_h = nn::maxpool_groups_backward(
        d_feats, lt.argmax, static_cast<Eigen::Index>(level.centroids) * level.neighbors);
    Matrix d_grouped = nn::mlp_backward(params_, level_mlps_[l], lt.mlp, d_h, grads);

    if (lt.prev_feat_dim == 0) break;  // level 0 consumed raw coordinates only
    Matrix d_prev = Matrix::Zero(lt.prev_feat_dim, lt.prev_cols);
    for (Eigen::Index c = 0; c < d_grouped.cols(); ++c) {
      d_prev.col(lt.gather[c]) += d_grouped.col(c).tail(lt.prev_feat_dim);
    }
    d_feats = std::move(d_prev);
  }
}

std::unique_ptr<PointEncoder> SetAbstractionEncoder::clone() const {
  auto copy = std::make_unique<SetAbstractionEncoder>(*this);
  return copy;
}

// ---- DynamicGraphEncoder ----------------------------------------------------

DynamicGraphEncoder::DynamicGraphEncoder(const ModelConfig& config, Rng& init_rng)
    : config_(config) {
  if (config_.dg_widths.empty()) throw ArgumentError("dynamic_graph: no edge layers configured");
  if (config_.dg_neighbors < 1) throw ArgumentError("dynamic_graph: k must be positive");

  int feat_dim = 3;
  for (std::size_t l = 0; l < config_.dg_widths.size(); ++l) {
    edge_mlps_.push_back(nn::add_mlp(params_, "edge" + std::to_string(l), 2 * feat_dim,
                                     {config_.dg_widths[l]}));
    feat_dim = config_.dg_widths[l];
  }
  int concat_dim = 0;
  for (int w : config_.dg_widths) concat_dim += w;
  pointwise_ = nn::add_mlp(params_, "pointwise", concat_dim, {config_.dg_global_width});

  std::vector<int> head_widths = config_.head_hidden;
  head_widths.push_back(config_.embedding_dim);
  head_ = nn::add_mlp(params_, "head", config_.dg_global_width, head_widths,
                      /*relu_after_last=*/false);
  nn::glorot_init(params_, init_rng);
}

Vector DynamicGraphEncoder::forward(const PointCloud& cloud,
                                    std::unique_ptr<EncoderTrace>* trace) const {
  check_forward_cloud(cloud);
  const Eigen::Index n = cloud.n_points();
  const int k = config_.dg_neighbors;
  if (k >= n) throw ArgumentError("dynamic_graph: k must be smaller than the point count");

  auto local = std::make_unique<DgTrace>();
  local->n_points = n;
  local->feats.push_back(cloud.points);

  for (std::size_t l = 0; l < edge_mlps_.size(); ++l) {
    const Matrix& f = local->feats.back();
    DgLayerTrace lt;
    lt.nbrs = knn_columns(f, k);

    Matrix edges(2 * f.rows(), n * k);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int j = 0; j < k; ++j) {
        const Eigen::Index c = i * k + j;
        edges.col(c).head(f.rows()) = f.col(i);
        edges.col(c).tail(f.rows()) = f.col(lt.nbrs[i][j]) - f.col(i);
      }
    }
    Matrix h = nn::mlp_forward(params_, edge_mlps_[l], edges, &lt.mlp);
    local->feats.push_back(nn::maxpool_groups(h, k, &lt.argmax));
    local->layers.push_back(std::move(lt));
  }

  Eigen::Index concat_dim = 0;
  for (std::size_t l = 1; l < local->feats.size(); ++l) concat_dim += local->feats[l].rows();
  Matrix concat(concat_dim, n);
  Eigen::Index row = 0;
  for (std::size_t l = 1; l < local->feats.size(); ++l) {
    concat.middleRows(row, local->feats[l].rows()) = local->feats[l];
    row += local->feats[l].rows();
  }

  Matrix p = nn::mlp_forward(params_, pointwise_, concat, &local->pointwise);
  Vector pooled = nn::maxpool_all(p, &local->global_argmax);

  Matrix head_out = nn::mlp_forward(params_, head_, pooled, &local->head);
  Vector embedding = nn::l2_normalize(head_out.col(0), &local->prenorm_norm, &local->fallback);
  local->y = embedding;

  if (trace) *trace = std::move(local);
  return embedding;
}

void DynamicGraphEncoder::backward(const EncoderTrace& trace, const Vector& d_embedding,
                                   nn::GradBuffer& grads) const {
  const auto& t = dynamic_cast<const DgTrace&>(trace);
  const Eigen::Index n = t.n_points;
  const int k = config_.dg_neighbors;

  Vector d_head_out = nn::l2_normalize_backward(t.y, t.prenorm_norm, t.fallback, d_embedding);
  Matrix d_pooled = nn::mlp_backward(params_, head_, t.head, d_head_out, grads);
  Matrix d_p = nn::maxpool_all_backward(d_pooled.col(0), t.global_argmax, n);
  Matrix d_concat = nn::mlp_backward(params_, pointwise_, t.pointwise, d_p, grads);

  // Direct gradient into each layer's features from the concatenation.
  std::vector<Matrix> d_feats(t.feats.size());
  Eigen::Index row = 0;
  for (std::size_t l = 1; l < t.feats.size(); ++l) {
    d_feats[l] = d_concat.middleRows(row, t.feats[l].rows());
    row += t.feats[l].rows();
  }

  for (int l = static_cast<int>(t.layers.size()) - 1; l >= 0; --l) {
    const auto& lt = t.layers[l];
    const Matrix& f_prev = t.feats[l];
    Matrix d_h = nn::maxpool_groups_backward(d_feats[l + 1], lt.argmax, n * k);
    Matrix d_edges = nn::mlp_backward(params_, edge_mlps_[l], lt.mlp, d_h, grads);

    if (l == 0) break;  // layer 0 consumed raw coordinates
    Matrix d_prev = Matrix::Zero(f_prev.rows(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int j = 0; j < k; ++j) {
        const Eigen::Index c = i * k + j;
        auto top = d_edges.col(c).head(f_prev.rows());
        auto bot = d_edges.col(c).tail(f_prev.rows());
        d_prev.col(i) += top - bot;
        d_prev.col(lt.nbrs[i][j]) += bot;
      }
    }
    d_feats[l] += d_prev;
  }
}

std::unique_ptr<PointEncoder> DynamicGraphEncoder::clone() const {
  return std::make_unique<DynamicGraphEncoder>(*this);
}

const std::vector<Matrix>& DynamicGraphEncoder::layer_features(const EncoderTrace& trace) {
  return dynamic_cast<const DgTrace&>(trace).feats;
}

// ---- CrossModalModel --------------------------------------------------------

std::unique_ptr<PointEncoder> make_encoder(const ModelConfig& config, Rng& init_rng) {
  if (config.family == EncoderFamily::kSetAbstraction) {
    return std::make_unique<SetAbstractionEncoder>(config, init_rng);
  }
  return std::make_unique<DynamicGraphEncoder>(config, init_rng);
}

CrossModalModel CrossModalModel::create(const ModelConfig& config, std::uint64_t seed) {
  CrossModalModel model;
  model.config_ = config;
  if (config.architecture == Architecture::kSiamese) {
    Rng rng(combine_seed(seed, fnv1a64("shared")));
    model.sketch_ = make_encoder(config, rng);
    model.shape_ = model.sketch_;
  } else {
    Rng sketch_rng(combine_seed(seed, fnv1a64("sketch")));
    Rng shape_rng(combine_seed(seed, fnv1a64("shape")));
    model.sketch_ = make_encoder(config, sketch_rng);
    model.shape_ = make_encoder(config, shape_rng);
  }
  return model;
}

CrossModalModel CrossModalModel::clone_for_heterogeneous(const CrossModalModel& siamese) {
  if (!siamese.is_siamese()) {
    throw CheckpointError("clone_for_heterogeneous: donor model is not Siamese");
  }
  CrossModalModel model;
  model.config_ = siamese.config_;
  model.config_.architecture = Architecture::kHeterogeneous;
  model.sketch_ = std::shared_ptr<PointEncoder>(siamese.sketch_->clone());
  model.shape_ = std::shared_ptr<PointEncoder>(siamese.sketch_->clone());
  return model;
}

nn::Vector CrossModalModel::encode(const PointCloud& cloud, Modality modality,
                                   std::unique_ptr<EncoderTrace>* trace) const {
  if (cloud.n_points() != config_.n_points) {
    throw ArgumentError("encode: cloud has " + std::to_string(cloud.n_points()) +
                        " points, model expects " + std::to_string(config_.n_points));
  }
  if (!cloud.normalized) {
    throw ArgumentError("encode: cloud is not normalized; run normalize_cloud first");
  }
  return encoder(modality).forward(cloud, trace);
}

PointEncoder& CrossModalModel::encoder(Modality modality) {
  return modality == Modality::kSketch ? *sketch_ : *shape_;
}

const PointEncoder& CrossModalModel::encoder(Modality modality) const {
  return modality == Modality::kSketch ? *sketch_ : *shape_;
}

std::vector<PointEncoder*> CrossModalModel::branches() {
  if (is_siamese()) return {sketch_.get()};
  return {sketch_.get(), shape_.get()};
}

std::vector<const PointEncoder*> CrossModalModel::branches() const {
  if (is_siamese()) return {sketch_.get()};
  return {sketch_.get(), shape_.get()};
}

std::vector<std::string> CrossModalModel::branch_names(Architecture architecture) {
  if (architecture == Architecture::kSiamese) return {"shared"};
  return {"sketch", "shape"};
}

}  // namespace vrsketch
