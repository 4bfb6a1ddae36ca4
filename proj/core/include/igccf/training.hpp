// Copyright 2026 The IGCCF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// BPR training of X^(0): triple sampling, user-profile dropout, gradients
// through the profile sum and the convolution, Adam, early stopping.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "igccf/data.hpp"
#include "igccf/graph.hpp"
#include "igccf/metrics.hpp"
#include "igccf/model.hpp"
#include "igccf/types.hpp"

namespace igccf {

using Rng = std::mt19937_64;

enum class L2Scope { BatchRows, AllRows };

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  ModelConfig model;
  double learning_rate = 1e-3;
  std::size_t batch_size = 1024;
  std::size_t epochs = 200;
  AdamParams adam;
  std::uint64_t seed = 42;
  std::size_t patience = 10;
  MetricSpec early_stop;
  // Inverted dropout: survivors scaled by 1/(1-p).
  bool rescale_dropout = true;
  L2Scope l2_scope = L2Scope::BatchRows;

  // Throws InvalidArgument naming the offending field.
  void validate() const;
};

struct Triple {
  UserIndex user;
  ItemIndex positive;
  ItemIndex negative;

  friend bool operator==(const Triple&, const Triple&) = default;
};

struct AdamState {
  DenseMatrix first_moment;
  DenseMatrix second_moment;
  std::uint64_t step = 0;

  AdamState() = default;
  AdamState(Eigen::Index rows, Eigen::Index cols)
      : first_moment(DenseMatrix::Zero(rows, cols)), second_moment(DenseMatrix::Zero(rows, cols)) {}
};

void adam_step(DenseMatrix& params, const DenseMatrix& grad, AdamState& state, double learning_rate,
               const AdamParams& adam);

// Uniform on [-sqrt(6/(I+d)), +sqrt(6/(I+d))].
ItemEmbeddings init_embeddings(std::size_t n_items, std::size_t dim, std::uint64_t seed);

// Samples (u, i+, i-): u uniform over users holding at least one positive and
// one non-positive, i+ uniform over u's positives, i- uniform over the
// catalogue and rejected while it is a positive.
class TripleSampler {
 public:
  explicit TripleSampler(const InteractionMatrix& train);

  std::vector<Triple> sample(std::size_t count, Rng& rng) const;
  std::span<const UserIndex> eligible_users() const { return eligible_; }
  // Users with positives covering the whole catalogue; never sampled.
  std::size_t skipped_users() const { return skipped_; }

 private:
  const InteractionMatrix* train_;
  std::vector<UserIndex> eligible_;
  std::size_t skipped_ = 0;
};

std::vector<Triple> sample_triples(const InteractionMatrix& train, std::size_t count, Rng& rng);

// Distinct users of a batch with their (unmasked) weighted profiles.
struct BatchProfiles {
  std::vector<UserIndex> users;
  std::vector<Profile> profiles;
  std::vector<std::size_t> slot;  // triple -> index into users/profiles
};

BatchProfiles gather_profiles(std::span<const Triple> triples, const InteractionMatrix& train,
                              ProfileWeighting weighting);

// Drops each entry with probability p; survivors are scaled by 1/(1-p) when
// `rescale` is set. A fully dropped profile keeps one uniformly chosen entry.
// p == 0 returns the input untouched and draws nothing from `rng`.
std::vector<Profile> apply_user_profile_dropout(std::span<const Profile> profiles, double p, Rng& rng,
                                                bool rescale = true);

// softplus(-x) = -ln(sigmoid(x)) without overflow.
double neg_log_sigmoid(double x);

// Distinct X^(0) rows read directly by the batch: positives, negatives and
// profile items. Sorted ascending.
std::vector<ItemIndex> touched_rows(std::span<const Triple> triples, std::span<const Profile> profiles);

// sum -ln sigma(pos - neg) + l2 * sum_{r in rows} ||x0_r||^2
double bpr_loss(std::span<const double> pos_scores, std::span<const double> neg_scores,
                const ItemEmbeddings& x0, std::span<const ItemIndex> rows, double l2);

struct LossAndGradient {
  double loss = 0.0;
  DenseMatrix gradient;  // dL/dX^(0)
};

// Forward and backward pass for one batch with fixed (already masked)
// profiles. `slot[t]` selects the profile of triple t.
LossAndGradient bpr_loss_and_gradient(const PropagationMatrix& p, std::size_t depth, const ItemEmbeddings& x0,
                                      std::span<const Triple> triples, std::span<const std::size_t> slot,
                                      std::span<const Profile> profiles, double l2, L2Scope l2_scope);

// Builds P from the training matrix following config.top_k / propagation.
std::shared_ptr<const PropagationMatrix> build_item_propagation(const InteractionMatrix& train,
                                                                const ModelConfig& config);

// ceil(|R+| / batch) sampled batches. Returns the mean batch loss. Throws
// TrainingDiverged on a non-finite loss.
double train_epoch(ItemEmbeddings& x0, AdamState& adam, const PropagationMatrix& p, const TripleSampler& sampler,
                   const InteractionMatrix& train, const TrainConfig& config, Rng& rng);

class Trainer {
 public:
  Trainer(const InteractionMatrix& train, TrainConfig config);
  Trainer(const InteractionMatrix& train, TrainConfig config, std::shared_ptr<const PropagationMatrix> p);

  double train_epoch();
  TrainedModel snapshot() const;

  const TrainConfig& config() const { return config_; }
  const ItemEmbeddings& parameters() const { return x0_; }
  const AdamState& adam() const { return adam_; }
  std::size_t epochs_done() const { return epochs_done_; }
  std::size_t batches_per_epoch() const;
  const std::shared_ptr<const PropagationMatrix>& propagation() const { return propagation_; }

  // Resumes from a checkpoint. Throws DimensionMismatch.
  void restore(ItemEmbeddings x0, AdamState adam, std::size_t epochs_done);

 private:
  const InteractionMatrix* train_;
  TrainConfig config_;
  std::shared_ptr<const PropagationMatrix> propagation_;
  TripleSampler sampler_;
  ItemEmbeddings x0_;
  AdamState adam_;
  Rng rng_;
  std::size_t epochs_done_ = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  std::optional<MetricsReport> validation;
  double seconds = 0.0;
};

struct FitResult {
  TrainedModel model;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  std::optional<double> best_score;
  double train_seconds = 0.0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Trains until config.epochs or until validation `early_stop` fails to improve
// for more than `patience` epochs; returns the best-validation snapshot. With
// no validation matrix, trains exactly config.epochs and returns the last
// state.
FitResult fit(const InteractionMatrix& train, const InteractionMatrix* validation, const TrainConfig& config,
              const EpochCallback& on_epoch = {});

// fit() with validation, then a fresh run on train ∪ validation for
// best_epoch epochs.
FitResult fit_and_retrain(const InteractionMatrix& train, const InteractionMatrix& validation,
                          const TrainConfig& config, const EpochCallback& on_epoch = {});

// Tab-separated: epoch, loss, seconds, then recall@N / ndcg@N per cutoff.
void write_history(std::ostream& out, std::span<const EpochRecord> history);

// Model file with an Adam appendix (magic "IGCCFADM", step, epochs, m, v as f64).
void save_checkpoint(const std::filesystem::path& path, const TrainedModel& model, const AdamState& adam,
                     std::size_t epochs_done);
struct Checkpoint {
  TrainedModel model;
  AdamState adam;
  std::size_t epochs_done = 0;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace igccf
