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

#include <memory>
#include <string>
#include <vector>

#include "vrsketch/geometry.hpp"
#include "vrsketch/nn.hpp"

namespace vrsketch {

enum class EncoderFamily { kSetAbstraction, kDynamicGraph };
enum class Architecture { kSiamese, kHeterogeneous };
enum class Modality { kSketch, kShape };

EncoderFamily parse_encoder_family(const std::string& name);
std::string encoder_family_name(EncoderFamily family);
Architecture parse_architecture(const std::string& name);
std::string architecture_name(Architecture architecture);

struct SetAbstractionLevel {
  int centroids = 0;
  double radius = 0.0;
  int neighbors = 0;
  std::vector<int> widths;

  bool operator==(const SetAbstractionLevel&) const = default;
};

struct ModelConfig {
  EncoderFamily family = EncoderFamily::kSetAbstraction;
  Architecture architecture = Architecture::kSiamese;
  int embedding_dim = 512;
  int n_points = 1024;

  // Hierarchical grouping levels, then the widths of the global level.
  std::vector<SetAbstractionLevel> sa_levels = {
      {512, 0.2, 32, {64, 64, 128}},
      {128, 0.4, 64, {128, 128, 256}},
  };
  std::vector<int> sa_global_widths = {256, 512, 1024};

  // Edge-convolution stack: per-layer output widths, graph size, and the
  // width of the pointwise layer before global pooling.
  int dg_neighbors = 20;
  std::vector<int> dg_widths = {64, 64, 128, 256};
  int dg_global_width = 1024;

  // Hidden widths of the projection head; the final layer maps to
  // embedding_dim and is not activated.
  std::vector<int> head_hidden = {512};

  bool operator==(const ModelConfig&) const = default;
};

// Down-scaled configuration for unit tests and desk-scale smoke runs.
ModelConfig tiny_model_config(EncoderFamily family, int n_points = 32, int embedding_dim = 16);

// Opaque per-forward activation record consumed by backward().
struct EncoderTrace {
  virtual ~EncoderTrace() = default;
};

// A point-cloud encoder mapping a normalized cloud to a unit-norm embedding.
// forward() is const and safe to call concurrently; backward() accumulates
// into a caller-owned gradient buffer.
class PointEncoder {
 public:
  virtual ~PointEncoder() = default;

  virtual nn::Vector forward(const PointCloud& cloud,
                             std::unique_ptr<EncoderTrace>* trace) const = 0;
  virtual void backward(const EncoderTrace& trace, const nn::Vector& d_embedding,
                        nn::GradBuffer& grads) const = 0;
  virtual std::unique_ptr<PointEncoder> clone() const = 0;

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }

 protected:
  nn::ParameterSet params_;
};

// Hierarchical grouping encoder: per level, farthest-point centroids gather
// radius-bounded neighborhoods, a shared per-point map runs over local
// coordinates plus features, and each group max-pools; a global level pools
// everything into the projection head.
class SetAbstractionEncoder : public PointEncoder {
 public:
  SetAbstractionEncoder(const ModelConfig& config, Rng& init_rng);

  nn::Vector forward(const PointCloud& cloud,
                     std::unique_ptr<EncoderTrace>* trace) const override;
  void backward(const EncoderTrace& trace, const nn::Vector& d_embedding,
                nn::GradBuffer& grads) const override;
  std::unique_ptr<PointEncoder> clone() const override;

  const ModelConfig& config() const { return config_; }

 private:
  ModelConfig config_;
  std::vector<nn::MlpSpec> level_mlps_;
  nn::MlpSpec global_mlp_;
  nn::MlpSpec head_;
};

// Edge-convolution encoder: per layer, the neighbor graph is recomputed in
// the current feature space, edge features (f_i, f_j - f_i) run through a
// shared map and max-aggregate over neighbors; layer outputs concatenate
// into a pointwise layer, global max-pool, projection head.
class DynamicGraphEncoder : public PointEncoder {
 public:
  DynamicGraphEncoder(const ModelConfig& config, Rng& init_rng);

  nn::Vector forward(const PointCloud& cloud,
                     std::unique_ptr<EncoderTrace>* trace) const override;
  void backward(const EncoderTrace& trace, const nn::Vector& d_embedding,
                nn::GradBuffer& grads) const override;
  std::unique_ptr<PointEncoder> clone() const override;

  const ModelConfig& config() const { return config_; }

  // Per-point features after every edge layer, for symmetry diagnostics.
  static const std::vector<nn::Matrix>& layer_features(const EncoderTrace& trace);

 private:
  ModelConfig config_;
  std::vector<nn::MlpSpec> edge_mlps_;
  nn::MlpSpec pointwise_;
  nn::MlpSpec head_;
};

// Cross-modal wrapper. Siamese holds one shared encoder serving both
// modalities; heterogeneous holds independent sketch and shape branches.
class CrossModalModel {
 public:
  static CrossModalModel create(const ModelConfig& config, std::uint64_t seed);

  // Both branches initialized to identical weights from a Siamese donor;
  // training then updates them independently.
  static CrossModalModel clone_for_heterogeneous(const CrossModalModel& siamese);

  // Validates the encode contract: normalized cloud with exactly the
  // configured point count.
  nn::Vector encode(const PointCloud& cloud, Modality modality,
                    std::unique_ptr<EncoderTrace>* trace = nullptr) const;

  PointEncoder& encoder(Modality modality);
  const PointEncoder& encoder(Modality modality) const;

  const ModelConfig& config() const { return config_; }
  bool is_siamese() const { return config_.architecture == Architecture::kSiamese; }

  // Branches in a stable order: {shared} for Siamese, {sketch, shape}
  // otherwise. Used by the optimizer and checkpoints.
  std::vector<PointEncoder*> branches();
  std::vector<const PointEncoder*> branches() const;
  static std::vector<std::string> branch_names(Architecture architecture);

 private:
  CrossModalModel() = default;
  ModelConfig config_;
  std::shared_ptr<PointEncoder> sketch_;
  std::shared_ptr<PointEncoder> shape_;  // aliases sketch_ when Siamese
};

std::unique_ptr<PointEncoder> make_encoder(const ModelConfig& config, Rng& init_rng);

}  // namespace vrsketch
