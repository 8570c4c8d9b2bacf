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

#include "vrsketch/trainer.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include <json.hpp>

#include "vrsketch/checkpoint.hpp"
#include "vrsketch/errors.hpp"
#include "vrsketch/log.hpp"

namespace vrsketch {

namespace {

int resolve_threads(const TrainConfig& config) {
  if (config.deterministic) return 1;
  if (config.n_threads > 0) return config.n_threads;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Strided parallel loop; every index writes only its own outputs. The first
// worker exception is rethrown on the calling thread after the join.
void parallel_for(int count, int n_threads, const std::function<void(int)>& fn) {
  n_threads = std::max(1, std::min(n_threads, count));
  if (n_threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(n_threads);
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([t, count, n_threads, &fn, &errors] {
      try {
        for (int i = t; i < count; i += n_threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

struct SeedStreams {
  Rng shuffle;
  Rng augment;
  Rng negatives;

  explicit SeedStreams(std::uint64_t seed)
      : shuffle(combine_seed(seed, fnv1a64("shuffle"))),
        augment(combine_seed(seed, fnv1a64("augment"))),
        negatives(combine_seed(seed, fnv1a64("negatives"))) {}
};

void append_metrics_line(const std::filesystem::path& path, int epoch, double loss,
                         const AccuracyReport& metrics, std::uint64_t seed) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw TrainingError("cannot append metrics log: " + path.string());
  nlohmann::json line;
  line["epoch"] = epoch;
  line["loss"] = loss;
  line["A@1"] = metrics.a1;
  line["A@5"] = metrics.a5;
  line["A@10"] = metrics.a10;
  line["seed"] = seed;
  out << line.dump() << "\n";
}

// Applies the per-run data policy: the seeded fraction draw over human pairs,
// then the seeded synthetic mix at the configured ratio.
std::vector<TrainingPair> compose_run_pairs(const std::vector<TrainingPair>& train_pairs,
                                            const std::vector<TrainingPair>& synthetic_pairs,
                                            const TrainConfig& train_config,
                                            const AugmentConfig& augment_config,
                                            std::uint64_t seed) {
  std::vector<TrainingPair> human = train_pairs;
  if (train_config.train_fraction < 1.0) {
    auto m = static_cast<std::size_t>(std::llround(
        train_config.train_fraction * static_cast<double>(train_pairs.size())));
    if (m < 2) {
      throw TrainingError("train fraction " + std::to_string(train_config.train_fraction) +
                          " leaves fewer than 2 pairs");
    }
    Rng rng(combine_seed(seed, fnv1a64("subset")));
    human.clear();
    for (std::size_t i : rng.sample_without_replacement(train_pairs.size(), m)) {
      human.push_back(train_pairs[i]);
    }
  }
  if (augment_config.synthetic_ratio > 0.0 && !synthetic_pairs.empty()) {
    Rng rng(combine_seed(seed, fnv1a64("compose")));
    return compose_training_set(human, synthetic_pairs, augment_config.synthetic_ratio, rng);
  }
  return human;
}

// Shared per-seed loop for both architectures. `model` arrives initialized.
RunRecord run_one_seed(CrossModalModel model, std::uint64_t seed,
                       const TrainConfig& train_config, const LossConfig& loss_config,
                       const AugmentConfig& augment_config,
                       const std::vector<TrainingPair>& train_pairs,
                       const std::vector<TrainingPair>& val_pairs, bool validate_at_start) {
  const int n_threads = resolve_threads(train_config);
  const std::filesystem::path run_dir =
      train_config.runs_dir / train_config.experiment_name / std::to_string(seed);
  std::filesystem::create_directories(run_dir);
  const std::filesystem::path metrics_path = run_dir / "metrics.jsonl";
  std::filesystem::remove(metrics_path);

  SeedStreams streams(seed);
  RunRecord record;
  record.seed = seed;

  auto branches = model.branches();
  std::vector<nn::Optimizer> optimizers;
  optimizers.reserve(branches.size());
  for (PointEncoder* branch : branches) {
    optimizers.emplace_back(train_config.optimizer, branch->params());
  }

  auto validate_and_checkpoint = [&](int epoch, double loss) {
    AccuracyReport metrics = validate_model(model, val_pairs, train_pairs, n_threads);
    std::filesystem::path ckpt = run_dir / ("epoch_" + std::to_string(epoch) + ".ckpt");
    save_checkpoint(ckpt, model, epoch,
                    {{"shuffle", streams.shuffle.serialize_state()},
                     {"augment", streams.augment.serialize_state()}});
    append_metrics_line(metrics_path, epoch, loss, metrics, seed);
    record.validations.push_back({epoch, metrics, ckpt});
  };

  if (validate_at_start) validate_and_checkpoint(0, std::numeric_limits<double>::quiet_NaN());

  std::vector<std::size_t> order(train_pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= train_config.epochs; ++epoch) {
    streams.shuffle.shuffle(order);

    double loss_sum = 0.0;
    int batch_count = 0;
    std::size_t cursor = 0;
    while (cursor < order.size()) {
      const auto batch_n = static_cast<int>(
          std::min<std::size_t>(train_config.batch_size, order.size() - cursor));
      if (batch_n < 2 && order.size() > 1) {
        // A singleton remainder has no negatives; skip it.
        cursor += batch_n;
        continue;
      }

      // Augmentation is sequential so the stream stays a pure function of
      // the seed regardless of thread count.
      std::vector<PointCloud> sketches(batch_n);
      std::vector<PointCloud> shapes(batch_n);
      for (int i = 0; i < batch_n; ++i) {
        const TrainingPair& pair = train_pairs[order[cursor + i]];
        sketches[i] = apply_augmentations(pair.sketch, augment_config, streams.augment);
        if (augment_config.augment_shapes) {
          shapes[i] = apply_augmentations(pair.shape, augment_config, streams.augment);
        } else {
          shapes[i] = pair.shape;
        }
      }

      // Pass 1: embeddings only, then the loss and its embedding gradients.
      EmbeddingBatch batch;
      batch.sketches.resize(model.config().embedding_dim, batch_n);
      batch.shapes.resize(model.config().embedding_dim, batch_n);
      parallel_for(2 * batch_n, n_threads, [&](int slot) {
        if (slot < batch_n) {
          batch.sketches.col(slot) =
              model.encoder(Modality::kSketch).forward(sketches[slot], nullptr);
        } else {
          batch.shapes.col(slot - batch_n) =
              model.encoder(Modality::kShape).forward(shapes[slot - batch_n], nullptr);
        }
      });

      if (!batch.sketches.allFinite() || !batch.shapes.allFinite()) {
        throw TrainingError("seed " + std::to_string(seed) + " epoch " + std::to_string(epoch) +
                            ": non-finite embeddings, aborting run");
      }
      LossResult loss = compute_loss(batch, loss_config, &streams.negatives);
      if (!std::isfinite(loss.value)) {
        throw TrainingError("seed " + std::to_string(seed) + " epoch " + std::to_string(epoch) +
                            ": non-finite loss, aborting run");
      }
      loss_sum += loss.value;
      ++batch_count;

      // Pass 2: re-run each cloud with a trace and accumulate parameter
      // gradients. Per-cloud buffers reduce in fixed cloud order, so the
      // result is independent of the thread count.
      const bool siamese = model.is_siamese();
      std::vector<nn::GradBuffer> cloud_grads(2 * batch_n);
      parallel_for(2 * batch_n, n_threads, [&](int slot) {
        const bool is_sketch = slot < batch_n;
        const int i = is_sketch ? slot : slot - batch_n;
        const PointEncoder& enc =
            model.encoder(is_sketch ? Modality::kSketch : Modality::kShape);
        cloud_grads[slot] = nn::make_grad_buffer(enc.params());
        std::unique_ptr<EncoderTrace> trace;
        enc.forward(is_sketch ? sketches[i] : shapes[i], &trace);
        enc.backward(*trace, is_sketch ? loss.d_sketches.col(i) : loss.d_shapes.col(i),
                     cloud_grads[slot]);
      });

      if (siamese) {
        nn::GradBuffer total = nn::make_grad_buffer(branches[0]->params());
        for (const auto& g : cloud_grads) nn::accumulate_grad_buffer(total, g);
        optimizers[0].step(branches[0]->params(), total);
      } else {
        nn::GradBuffer sketch_total = nn::make_grad_buffer(branches[0]->params());
        nn::GradBuffer shape_total = nn::make_grad_buffer(branches[1]->params());
        for (int i = 0; i < batch_n; ++i) {
          nn::accumulate_grad_buffer(sketch_total, cloud_grads[i]);
          nn::accumulate_grad_buffer(shape_total, cloud_grads[batch_n + i]);
        }
        optimizers[0].step(branches[0]->params(), sketch_total);
        optimizers[1].step(branches[1]->params(), shape_total);
      }

      cursor += batch_n;
    }

    double epoch_loss = batch_count > 0 ? loss_sum / batch_count : 0.0;
    record.epoch_losses.push_back(epoch_loss);

    if (epoch % train_config.validation_every == 0 || epoch == train_config.epochs) {
      validate_and_checkpoint(epoch, epoch_loss);
    }
  }
  return record;
}

std::vector<RunRecord> train_impl(const ModelConfig& model_config,
                                  const TrainConfig& train_config, const LossConfig& loss_config,
                                  const AugmentConfig& augment_config,
                                  const std::vector<TrainingPair>& train_pairs,
                                  const std::vector<TrainingPair>& val_pairs,
                                  const std::vector<TrainingPair>& synthetic_pairs,
                                  const std::filesystem::path* donor_checkpoint) {
  train_config.validate();
  augment_config.validate();
  if (train_pairs.empty()) throw ArgumentError("train: empty training split");
  if (val_pairs.empty()) throw ArgumentError("train: empty validation split");

  std::vector<RunRecord> runs;
  for (std::uint64_t seed : train_config.seeds) {
    CrossModalModel model =
        donor_checkpoint
            ? clone_checkpoint_for_heterogeneous(*donor_checkpoint, &model_config)
            : CrossModalModel::create(model_config, seed);
    std::vector<TrainingPair> run_pairs =
        compose_run_pairs(train_pairs, synthetic_pairs, train_config, augment_config, seed);
    runs.push_back(run_one_seed(std::move(model), seed, train_config, loss_config,
                                augment_config, run_pairs, val_pairs,
                                /*validate_at_start=*/donor_checkpoint != nullptr));
  }
  return runs;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ArgumentError("train: epochs must be >= 1");
  if (batch_size < 1) throw ArgumentError("train: batch_size must be >= 1");
  if (seeds.empty()) throw ArgumentError("train: need at least one seed");
  if (validation_every < 1) throw ArgumentError("train: validation_every must be >= 1");
  if (train_fraction <= 0.0 || train_fraction > 1.0) {
    throw ArgumentError("train: train_fraction must be in (0, 1]");
  }
}

Eigen::MatrixXd embed_clouds(const CrossModalModel& model, Modality modality,
                             const std::vector<const PointCloud*>& clouds, int n_threads) {
  Eigen::MatrixXd out(model.config().embedding_dim, static_cast<Eigen::Index>(clouds.size()));
  const PointEncoder& enc = model.encoder(modality);
  parallel_for(static_cast<int>(clouds.size()), n_threads,
               [&](int i) { out.col(i) = enc.forward(*clouds[i], nullptr); });
  return out;
}

AccuracyReport validate_model(const CrossModalModel& model,
                              const std::vector<TrainingPair>& val_pairs,
                              const std::vector<TrainingPair>& train_pairs, int n_threads) {
  if (val_pairs.empty()) throw ArgumentError("validate_model: no validation pairs");

  // Gallery: validation shapes plus training shapes, one entry per shape id.
  std::vector<std::pair<std::string, const PointCloud*>> gallery;
  std::set<std::string> seen;
  for (const auto* pairs : {&val_pairs, &train_pairs}) {
    for (const TrainingPair& p : *pairs) {
      if (seen.insert(p.shape_id).second) gallery.push_back({p.shape_id, &p.shape});
    }
  }

  std::vector<const PointCloud*> gallery_clouds;
  for (const auto& [id, cloud] : gallery) gallery_clouds.push_back(cloud);
  Eigen::MatrixXd gallery_emb =
      embed_clouds(model, Modality::kShape, gallery_clouds, n_threads);

  GalleryIndex index;
  index.fingerprint = model_fingerprint(model);
  index.embeddings = std::move(gallery_emb);
  for (const auto& [id, cloud] : gallery) index.shape_ids.push_back(id);

  std::vector<const PointCloud*> query_clouds;
  for (const TrainingPair& p : val_pairs) query_clouds.push_back(&p.sketch);
  Eigen::MatrixXd query_emb = embed_clouds(model, Modality::kSketch, query_clouds, n_threads);

  if (!index.embeddings.allFinite() || !query_emb.allFinite()) {
    throw TrainingError("validate_model: non-finite embeddings, model has diverged");
  }

  const int k = std::min<int>(10, static_cast<int>(index.shape_ids.size()));
  std::vector<RetrievalResult> results;
  std::map<std::string, std::string> gt;
  for (std::size_t i = 0; i < val_pairs.size(); ++i) {
    results.push_back(
        retrieve(index, query_emb.col(static_cast<Eigen::Index>(i)), k, val_pairs[i].pair_id));
    gt[val_pairs[i].pair_id] = val_pairs[i].shape_id;
  }
  return accuracy_summary(results, gt);
}

std::vector<RunRecord> train(const ModelConfig& model_config, const TrainConfig& train_config,
                             const LossConfig& loss_config, const AugmentConfig& augment_config,
                             const std::vector<TrainingPair>& train_pairs,
                             const std::vector<TrainingPair>& val_pairs,
                             const std::vector<TrainingPair>& synthetic_pairs) {
  if (model_config.architecture == Architecture::kHeterogeneous) {
    throw ConfigError(
        "train: heterogeneous training starts from a Siamese donor; use train_heterogeneous");
  }
  return train_impl(model_config, train_config, loss_config, augment_config, train_pairs,
                    val_pairs, synthetic_pairs, nullptr);
}

std::vector<RunRecord> train_heterogeneous(const ModelConfig& model_config,
                                           const TrainConfig& train_config,
                                           const LossConfig& loss_config,
                                           const AugmentConfig& augment_config,
                                           const std::vector<TrainingPair>& train_pairs,
                                           const std::vector<TrainingPair>& val_pairs,
                                           const std::filesystem::path& donor_checkpoint,
                                           const std::vector<TrainingPair>& synthetic_pairs) {
  if (!std::filesystem::exists(donor_checkpoint)) {
    throw ConfigError("train_heterogeneous: donor Siamese checkpoint not found: " +
                      donor_checkpoint.string() + " (expected the epoch " +
                      std::to_string(train_config.donor_epoch) + " checkpoint)");
  }
  ModelConfig config = model_config;
  config.architecture = Architecture::kHeterogeneous;
  return train_impl(config, train_config, loss_config, augment_config, train_pairs, val_pairs,
                    synthetic_pairs, &donor_checkpoint);
}

BestSelection select_best(const std::vector<RunRecord>& runs) {
  if (runs.empty()) throw ArgumentError("select_best: no runs");

  std::optional<BestSelection> best;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (runs[r].validations.empty()) {
      throw ArgumentError("select_best: run " + std::to_string(r) + " has no validation points");
    }
    for (const ValidationPoint& v : runs[r].validations) {
      bool better = false;
      if (!best) {
        better = true;
      } else if (v.metrics.a1 != best->metrics.a1) {
        better = v.metrics.a1 > best->metrics.a1;
      } else if (v.metrics.a5 != best->metrics.a5) {
        better = v.metrics.a5 > best->metrics.a5;
      } else if (v.metrics.a10 != best->metrics.a10) {
        better = v.metrics.a10 > best->metrics.a10;
      } else if (r == best->run_index) {
        better = v.epoch < best->epoch;
      }
      if (better) best = BestSelection{r, runs[r].seed, v.epoch, v.metrics, v.checkpoint};
    }
  }
  return *best;
}

}  // namespace vrsketch
