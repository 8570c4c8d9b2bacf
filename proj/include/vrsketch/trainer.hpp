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
#include <vector>

#include "vrsketch/augment.hpp"
#include "vrsketch/encoder.hpp"
#include "vrsketch/loss.hpp"
#include "vrsketch/nn.hpp"
#include "vrsketch/retrieval.hpp"

namespace vrsketch {

struct TrainConfig {
  int epochs = 300;
  int batch_size = 6;  // the contrastive DGCNN regime runs 24
  nn::OptimizerConfig optimizer;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  int validation_every = 1;
  // Reproducible across machines: single-threaded with a fixed reduction
  // layout. Gradient reduction is in fixed cloud order in either mode.
  bool deterministic = false;
  int n_threads = 0;  // 0 = hardware concurrency
  int donor_epoch = 100;
  std::filesystem::path runs_dir = "runs";
  std::string experiment_name = "default";
  // Fraction of the human training pairs used per run; each run draws its
  // own seeded subset. 1.0 keeps everything.
  double train_fraction = 1.0;

  void validate() const;
};

// One sketch-shape pair prepared for training: both clouds normalized and
// sampled to the model's point count.
struct TrainingPair {
  std::string pair_id;
  std::string shape_id;
  PointCloud sketch;
  PointCloud shape;
};

struct ValidationPoint {
  int epoch = 0;
  AccuracyReport metrics;
  std::filesystem::path checkpoint;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<double> epoch_losses;  // mean batch loss per epoch
  std::vector<ValidationPoint> validations;
};

// Embeds a batch of clouds through one modality branch (read-only, threaded).
Eigen::MatrixXd embed_clouds(const CrossModalModel& model, Modality modality,
                             const std::vector<const PointCloud*>& clouds, int n_threads);

// Validation protocol used during training: the validation sketches query a
// gallery of validation plus training shapes. The full-gallery test protocol
// lives in retrieval evaluation.
AccuracyReport validate_model(const CrossModalModel& model,
                              const std::vector<TrainingPair>& val_pairs,
                              const std::vector<TrainingPair>& train_pairs, int n_threads);

// One run per seed: seeded shuffled mini-batches, on-the-fly augmentation,
// loss and optimizer step, periodic validation with a checkpoint at every
// validation point. Deterministic given the seed. A non-finite loss aborts
// the run with a diagnostic.
//
// Per run, the human pairs are reduced to train_fraction by a seeded draw,
// then floor(synthetic_ratio * |human|) synthetic pairs mix in (seeded,
// without replacement).
std::vector<RunRecord> train(const ModelConfig& model_config, const TrainConfig& train_config,
                             const LossConfig& loss_config, const AugmentConfig& augment_config,
                             const std::vector<TrainingPair>& train_pairs,
                             const std::vector<TrainingPair>& val_pairs,
                             const std::vector<TrainingPair>& synthetic_pairs = {});

// As train(), but every run starts from the Siamese donor checkpoint (the
// donor's weights at train_config.donor_epoch) cloned into both branches.
std::vector<RunRecord> train_heterogeneous(const ModelConfig& model_config,
                                           const TrainConfig& train_config,
                                           const LossConfig& loss_config,
                                           const AugmentConfig& augment_config,
                                           const std::vector<TrainingPair>& train_pairs,
                                           const std::vector<TrainingPair>& val_pairs,
                                           const std::filesystem::path& donor_checkpoint,
                                           const std::vector<TrainingPair>& synthetic_pairs = {});

struct BestSelection {
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  int epoch = 0;
  AccuracyReport metrics;
  std::filesystem::path checkpoint;
};

// The (run, epoch) with the best validation A@1; ties break by higher A@5,
// then A@10, then earlier epoch, then run order.
BestSelection select_best(const std::vector<RunRecord>& runs);

}  // namespace vrsketch
