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

#include "igccf/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "igccf/errors.hpp"

namespace igccf {

namespace {

void require(bool ok, const std::string& field, const std::string& rule, const std::string& got) {
  if (!ok) throw InvalidArgument(field + ": " + rule + ", got " + got);
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// sigma(-x), stable for large |x|.
double sigmoid_neg(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void TrainConfig::validate() const {
  require(model.dim >= 1, "dim", "must be >= 1", num(static_cast<double>(model.dim)));
  require(!model.top_k || *model.top_k >= 1, "top_k", "must be >= 1 (or unset for no pruning)",
          model.top_k ? num(static_cast<double>(*model.top_k)) : "unset");
  require(model.dropout >= 0.0 && model.dropout < 1.0, "dropout", "must be in [0, 1)", num(model.dropout));
  require(std::isfinite(model.l2) && model.l2 >= 0.0, "l2", "must be finite and >= 0", num(model.l2));
  require(std::isfinite(learning_rate) && learning_rate > 0.0, "learning_rate", "must be > 0", num(learning_rate));
  require(batch_size >= 1, "batch_size", "must be >= 1", num(static_cast<double>(batch_size)));
  require(epochs >= 1, "epochs", "must be >= 1", num(static_cast<double>(epochs)));
  require(adam.beta1 >= 0.0 && adam.beta1 < 1.0, "adam_beta1", "must be in [0, 1)", num(adam.beta1));
  require(adam.beta2 >= 0.0 && adam.beta2 < 1.0, "adam_beta2", "must be in [0, 1)", num(adam.beta2));
  require(adam.epsilon > 0.0, "adam_epsilon", "must be > 0", num(adam.epsilon));
  require(early_stop.cutoff >= 1, "early_stop", "cutoff must be >= 1", num(static_cast<double>(early_stop.cutoff)));
}

// ---------------------------------------------------------------------------
// Optimiser and initialisation

void adam_step(DenseMatrix& params, const DenseMatrix& grad, AdamState& state, double learning_rate,
               const AdamParams& adam) {
  if (grad.rows() != params.rows() || grad.cols() != params.cols() || state.first_moment.rows() != params.rows() ||
      state.first_moment.cols() != params.cols()) {
    throw DimensionMismatch("adam_step: parameter, gradient and moment shapes differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(adam.beta1, t);
  const double c2 = 1.0 - std::pow(adam.beta2, t);
  state.first_moment = adam.beta1 * state.first_moment + (1.0 - adam.beta1) * grad;
  state.second_moment = adam.beta2 * state.second_moment + (1.0 - adam.beta2) * grad.cwiseAbs2();
  params.array() -= learning_rate * (state.first_moment.array() / c1) /
                    ((state.second_moment.array() / c2).sqrt() + adam.epsilon);
}

ItemEmbeddings init_embeddings(std::size_t n_items, std::size_t dim, std::uint64_t seed) {
  if (n_items < 1 || dim < 1) throw InvalidArgument("init_embeddings: I and d must be >= 1");
  const double bound = std::sqrt(6.0 / static_cast<double>(n_items + dim));
  Rng rng(seed);
  std::uniform_real_distribution<double> uniform(-bound, bound);
  ItemEmbeddings x(static_cast<Eigen::Index>(n_items), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(i, c) = uniform(rng);
  return x;
}

// ---------------------------------------------------------------------------
// Sampling and dropout

TripleSampler::TripleSampler(const InteractionMatrix& train) : train_(&train) {
  for (UserIndex u = 0; u < train.n_users(); ++u) {
    const auto n = train.row(u).size();
    if (n == 0) continue;
    if (n >= train.n_items()) {
      ++skipped_;
      continue;
    }
    eligible_.push_back(u);
  }
}

std::vector<Triple> TripleSampler::sample(std::size_t count, Rng& rng) const {
  if (eligible_.empty()) {
    throw InvalidArgument("sample_triples: no user has both a positive and a non-positive item");
  }
  std::uniform_int_distribution<std::size_t> pick_user(0, eligible_.size() - 1);
  std::uniform_int_distribution<ItemIndex> pick_item(0, static_cast<ItemIndex>(train_->n_items() - 1));
  std::vector<Triple> triples;
  triples.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    const auto u = eligible_[pick_user(rng)];
    const auto row = train_->row(u);
    std::uniform_int_distribution<std::size_t> pick_pos(0, row.size() - 1);
    const auto positive = row[pick_pos(rng)];
    ItemIndex negative = 0;
    do {
      negative = pick_item(rng);
    } while (std::binary_search(row.begin(), row.end(), negative));
    triples.push_back({u, positive, negative});
  }
  return triples;
}

std::vector<Triple> sample_triples(const InteractionMatrix& train, std::size_t count, Rng& rng) {
  return TripleSampler(train).sample(count, rng);
}

BatchProfiles gather_profiles(std::span<const Triple> triples, const InteractionMatrix& train,
                              ProfileWeighting weighting) {
  BatchProfiles batch;
  std::unordered_map<UserIndex, std::size_t> slot_of;
  batch.slot.reserve(triples.size());
  for (const auto& t : triples) {
    auto [it, inserted] = slot_of.emplace(t.user, batch.users.size());
    if (inserted) {
      batch.users.push_back(t.user);
      batch.profiles.push_back(make_profile(train.row(t.user), weighting));
    }
    batch.slot.push_back(it->second);
  }
  return batch;
}

std::vector<Profile> apply_user_profile_dropout(std::span<const Profile> profiles, double p, Rng& rng, bool rescale) {
  if (!(p >= 0.0 && p < 1.0)) throw InvalidArgument("dropout probability must be in [0, 1)");
  std::vector<Profile> out(profiles.begin(), profiles.end());
  if (p == 0.0) return out;
  const double scale = rescale ? 1.0 / (1.0 - p) : 1.0;
  std::bernoulli_distribution drop(p);
  for (auto& profile : out) {
    if (profile.empty()) continue;
    Profile kept;
    kept.reserve(profile.size());
    for (const auto& entry : profile)
      if (!drop(rng)) kept.push_back(entry);
    if (kept.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, profile.size() - 1);
      kept.push_back(profile[pick(rng)]);
    }
    for (auto& entry : kept) entry.weight *= scale;
    profile = std::move(kept);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Loss and gradient

double neg_log_sigmoid(double x) {
  if (x >= 0.0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

std::vector<ItemIndex> touched_rows(std::span<const Triple> triples, std::span<const Profile> profiles) {
  std::vector<ItemIndex> rows;
  rows.reserve(2 * triples.size());
  for (const auto& t : triples) {
    rows.push_back(t.positive);
    rows.push_back(t.negative);
  }
  for (const auto& profile : profiles)
    for (const auto& entry : profile) rows.push_back(entry.item);
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

double bpr_loss(std::span<const double> pos_scores, std::span<const double> neg_scores, const ItemEmbeddings& x0,
                std::span<const ItemIndex> rows, double l2) {
  if (pos_scores.size() != neg_scores.size()) throw DimensionMismatch("bpr_loss: score vectors differ in length");
  double loss = 0.0;
  for (std::size_t t = 0; t < pos_scores.size(); ++t) loss += neg_log_sigmoid(pos_scores[t] - neg_scores[t]);
  if (l2 != 0.0) {
    double norm = 0.0;
    for (ItemIndex r : rows) norm += x0.row(r).squaredNorm();
    loss += l2 * norm;
  }
  return loss;
}

LossAndGradient bpr_loss_and_gradient(const PropagationMatrix& p, std::size_t depth, const ItemEmbeddings& x0,
                                      std::span<const Triple> triples, std::span<const std::size_t> slot,
                                      std::span<const Profile> profiles, double l2, L2Scope l2_scope) {
  if (slot.size() != triples.size()) throw DimensionMismatch("bpr_loss_and_gradient: slot/triple count differs");
  const auto dim = x0.cols();
  const ItemEmbeddings xk = propagate(p, x0, depth);

  DenseMatrix users(static_cast<Eigen::Index>(profiles.size()), dim);
  for (std::size_t s = 0; s < profiles.size(); ++s) users.row(static_cast<Eigen::Index>(s)) = embed_user(profiles[s], xk).vector;

  DenseMatrix grad_xk = DenseMatrix::Zero(xk.rows(), dim);
  DenseMatrix grad_users = DenseMatrix::Zero(users.rows(), dim);
  std::vector<double> pos(triples.size()), neg(triples.size());
  for (std::size_t t = 0; t < triples.size(); ++t) {
    const auto& tr = triples[t];
    const auto s = static_cast<Eigen::Index>(slot[t]);
    if (slot[t] >= profiles.size()) throw DimensionMismatch("bpr_loss_and_gradient: slot out of range");
    const auto xu = users.row(s);
    pos[t] = xu.dot(xk.row(tr.positive));
    neg[t] = xu.dot(xk.row(tr.negative));
    // d/dx [-ln sigma(x)] = -sigma(-x), x = pos - neg.
    const double g = -sigmoid_neg(pos[t] - neg[t]);
    grad_xk.row(tr.positive) += g * xu;
    grad_xk.row(tr.negative) -= g * xu;
    grad_users.row(s) += g * (xk.row(tr.positive) - xk.row(tr.negative));
  }
  // Back through x_u = sum_i lambda_ui x_i^(k).
  for (std::size_t s = 0; s < profiles.size(); ++s)
    for (const auto& entry : profiles[s]) grad_xk.row(entry.item) += entry.weight * grad_users.row(static_cast<Eigen::Index>(s));

  LossAndGradient result;
  // X^(k) = P^k X^(0)  =>  dL/dX^(0) = (P^T)^k dL/dX^(k).
  result.gradient = propagate_transposed(p, grad_xk, depth);

  std::vector<ItemIndex> rows;
  if (l2 != 0.0) {
    if (l2_scope == L2Scope::BatchRows) {
      rows = touched_rows(triples, profiles);
    } else {
      rows.resize(static_cast<std::size_t>(x0.rows()));
      std::iota(rows.begin(), rows.end(), ItemIndex{0});
    }
    for (ItemIndex r : rows) result.gradient.row(r) += 2.0 * l2 * x0.row(r);
  }
  result.loss = bpr_loss(pos, neg, x0, rows, l2);
  return result;
}

// ---------------------------------------------------------------------------
// Epochs

std::shared_ptr<const PropagationMatrix> build_item_propagation(const InteractionMatrix& train,
                                                                const ModelConfig& config) {
  const auto graph = config.top_k ? project_cosine_topk(train, *config.top_k, /*allow_empty_items=*/true)
                                  : project_cosine(train, /*allow_empty_items=*/true);
  return std::make_shared<const PropagationMatrix>(build_propagation(graph, config.propagation));
}

namespace {

std::size_t batches_for(const InteractionMatrix& train, std::size_t batch_size) {
  return std::max<std::size_t>(1, (train.nnz() + batch_size - 1) / batch_size);
}

}  // namespace

double train_epoch(ItemEmbeddings& x0, AdamState& adam, const PropagationMatrix& p, const TripleSampler& sampler,
                   const InteractionMatrix& train, const TrainConfig& config, Rng& rng) {
  const auto n_batches = batches_for(train, config.batch_size);
  const auto& mc = config.model;
  double total = 0.0;
  for (std::size_t b = 0; b < n_batches; ++b) {
    const auto triples = sampler.sample(config.batch_size, rng);
    auto batch = gather_profiles(triples, train, mc.weighting);
    if (mc.dropout > 0.0) batch.profiles = apply_user_profile_dropout(batch.profiles, mc.dropout, rng, config.rescale_dropout);
    auto step = bpr_loss_and_gradient(p, mc.depth, x0, triples, batch.slot, batch.profiles, mc.l2, config.l2_scope);
    if (!std::isfinite(step.loss) || !step.gradient.allFinite()) {
      std::ostringstream msg;
      msg << "training diverged: non-finite loss at batch " << b << " (learning_rate=" << config.learning_rate
          << "); try a smaller learning rate or a larger l2";
      throw TrainingDiverged(msg.str());
    }
    adam_step(x0, step.gradient, adam, config.learning_rate, config.adam);
    total += step.loss;
  }
  return total / static_cast<double>(n_batches);
}

Trainer::Trainer(const InteractionMatrix& train, TrainConfig config)
    : Trainer(train, config, build_item_propagation(train, config.model)) {}

Trainer::Trainer(const InteractionMatrix& train, TrainConfig config, std::shared_ptr<const PropagationMatrix> p)
    : train_(&train),
      config_(std::move(config)),
      propagation_(std::move(p)),
      sampler_(train),
      x0_(init_embeddings(train.n_items(), config_.model.dim, config_.seed)),
      adam_(x0_.rows(), x0_.cols()),
      rng_(config_.seed ^ 0x9E3779B97F4A7C15ULL) {
  if (!propagation_ || propagation_->n_items() != train.n_items()) {
    throw DimensionMismatch("Trainer: propagation matrix does not match the item count");
  }
}

double Trainer::train_epoch() {
  const double loss = igccf::train_epoch(x0_, adam_, *propagation_, sampler_, *train_, config_, rng_);
  ++epochs_done_;
  return loss;
}

TrainedModel Trainer::snapshot() const { return TrainedModel(config_.model, train_->item_index(), propagation_, x0_); }

std::size_t Trainer::batches_per_epoch() const { return batches_for(*train_, config_.batch_size); }

void Trainer::restore(ItemEmbeddings x0, AdamState adam, std::size_t epochs_done) {
  if (x0.rows() != x0_.rows() || x0.cols() != x0_.cols() || adam.first_moment.rows() != x0_.rows() ||
      adam.first_moment.cols() != x0_.cols() || adam.second_moment.rows() != x0_.rows() ||
      adam.second_moment.cols() != x0_.cols()) {
    throw DimensionMismatch("Trainer::restore: checkpoint shape differs from the training problem");
  }
  x0_ = std::move(x0);
  adam_ = std::move(adam);
  epochs_done_ = epochs_done;
}

// ---------------------------------------------------------------------------
// fit

FitResult fit(const InteractionMatrix& train, const InteractionMatrix* validation, const TrainConfig& config,
              const EpochCallback& on_epoch) {
  config.validate();
  if (validation && !train.shares_universe_with(*validation)) {
    throw InvalidArgument("fit: train and validation do not share a user/item universe");
  }
  Trainer trainer(train, config);

  std::set<std::size_t> cutoff_set{5, 20, config.early_stop.cutoff};
  const std::vector<std::size_t> cutoffs(cutoff_set.begin(), cutoff_set.end());

  std::vector<EpochRecord> history;
  std::optional<ItemEmbeddings> best_x0;
  std::optional<double> best_score;
  std::size_t best_epoch = 0;
  std::size_t bad_epochs = 0;
  double train_seconds = 0.0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = Clock::now();
    EpochRecord record;
    record.epoch = epoch;
    record.loss = trainer.train_epoch();
    record.seconds = seconds_since(start);
    train_seconds += record.seconds;

    if (validation) {
      record.validation = evaluate_users(trainer.snapshot(), train, *validation, cutoffs, Protocol::Transductive);
      const double score = config.early_stop.read(*record.validation);
      if (!best_score || score > *best_score) {
        best_score = score;
        best_epoch = epoch;
        best_x0 = trainer.parameters();
        bad_epochs = 0;
      } else {
        ++bad_epochs;
      }
    }
    history.push_back(record);
    if (on_epoch) on_epoch(history.back());
    if (validation && bad_epochs > config.patience) break;
  }

  if (!validation) {
    best_epoch = trainer.epochs_done();
    best_x0 = trainer.parameters();
  }
  TrainedModel model(config.model, train.item_index(), trainer.propagation(), std::move(*best_x0));
  return FitResult{std::move(model), std::move(history), best_epoch, best_score, train_seconds};
}

FitResult fit_and_retrain(const InteractionMatrix& train, const InteractionMatrix& validation,
                          const TrainConfig& config, const EpochCallback& on_epoch) {
  auto tuned = fit(train, &validation, config, on_epoch);
  const auto merged = merge(train, validation);
  TrainConfig final_config = config;
  final_config.epochs = std::max<std::size_t>(1, tuned.best_epoch);
  auto final_fit = fit(merged, nullptr, final_config);
  return FitResult{std::move(final_fit.model), std::move(tuned.history), tuned.best_epoch, tuned.best_score,
                   tuned.train_seconds + final_fit.train_seconds};
}

void write_history(std::ostream& out, std::span<const EpochRecord> history) {
  std::vector<std::size_t> cutoffs;
  for (const auto& rec : history) {
    if (!rec.validation) continue;
    for (const auto& [n, m] : rec.validation->by_cutoff) cutoffs.push_back(n);
    break;
  }
  out << "epoch\tloss\tseconds";
  for (auto n : cutoffs) out << "\tval_recall@" << n << "\tval_ndcg@" << n;
  out << '\n';
  for (const auto& rec : history) {
    out << rec.epoch << '\t' << std::setprecision(10) << rec.loss << '\t' << std::setprecision(4) << rec.seconds;
    for (auto n : cutoffs) {
      if (rec.validation) {
        out << '\t' << std::setprecision(6) << rec.validation->recall(n) << '\t' << rec.validation->ndcg(n);
      } else {
        out << "\t\t";
      }
    }
    out << '\n';
  }
}

}  // namespace igccf
