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

#include "igccf/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "igccf/errors.hpp"

namespace igccf {

namespace {

// Shared by the single-user and all-user paths so both sum in the same order.
void accumulate_profile(Eigen::Ref<Vector> out, std::span<const ProfileEntry> profile, const ItemEmbeddings& items) {
  const auto n_items = static_cast<std::size_t>(items.rows());
  for (const auto& entry : profile) {
    if (entry.item >= n_items) {
      throw InvalidArgument("profile item " + std::to_string(entry.item) + " out of range for " +
                            std::to_string(n_items) + " items");
    }
    out.noalias() += entry.weight * items.row(entry.item);
  }
}

}  // namespace

Profile make_profile(std::span<const ItemIndex> items, ProfileWeighting weighting) {
  Profile profile;
  profile.reserve(items.size());
  const double w = (weighting == ProfileWeighting::Mean && !items.empty()) ? 1.0 / static_cast<double>(items.size()) : 1.0;
  for (ItemIndex i : items) profile.push_back({i, w});
  return profile;
}

UserEmbedding embed_user(std::span<const ProfileEntry> profile, const ItemEmbeddings& items) {
  UserEmbedding user;
  user.vector = Vector::Zero(items.cols());
  user.source_profile_size = profile.size();
  accumulate_profile(user.vector, profile, items);
  return user;
}

SparseMatrix weighted_interactions(const InteractionMatrix& matrix, ProfileWeighting weighting) {
  std::vector<Eigen::Triplet<double>> coo;
  coo.reserve(matrix.nnz());
  for (UserIndex u = 0; u < matrix.n_users(); ++u) {
    const auto row = matrix.row(u);
    const double w = weighting == ProfileWeighting::Mean ? 1.0 / static_cast<double>(row.size()) : 1.0;
    for (ItemIndex i : row) coo.emplace_back(static_cast<int>(u), static_cast<int>(i), w);
  }
  SparseMatrix weighted(static_cast<Eigen::Index>(matrix.n_users()), static_cast<Eigen::Index>(matrix.n_items()));
  weighted.setFromTriplets(coo.begin(), coo.end());
  weighted.makeCompressed();
  return weighted;
}

DenseMatrix embed_all_users(const SparseMatrix& weighted, const ItemEmbeddings& items) {
  if (weighted.cols() != items.rows()) {
    throw DimensionMismatch("embed_all_users: R~ has " + std::to_string(weighted.cols()) + " columns, X has " +
                            std::to_string(items.rows()) + " rows");
  }
  DenseMatrix users = DenseMatrix::Zero(weighted.rows(), items.cols());
  Profile profile;
  for (Eigen::Index u = 0; u < weighted.outerSize(); ++u) {
    profile.clear();
    for (SparseMatrix::InnerIterator it(weighted, u); it; ++it)
      profile.push_back({static_cast<ItemIndex>(it.col()), it.value()});
    accumulate_profile(users.row(u), profile, items);
  }
  return users;
}

double score(const Eigen::Ref<const Vector>& user, const Eigen::Ref<const Vector>& item) {
  if (user.size() != item.size()) throw DimensionMismatch("score: embedding sizes differ");
  return user.dot(item);
}

std::vector<ScoredItem> top_n(std::span<const double> scores, std::size_t n, std::span<const ItemIndex> excluded) {
  std::vector<ItemIndex> candidates;
  candidates.reserve(scores.size());
  std::size_t next_excluded = 0;
  for (ItemIndex i = 0; i < scores.size(); ++i) {
    while (next_excluded < excluded.size() && excluded[next_excluded] < i) ++next_excluded;
    if (next_excluded < excluded.size() && excluded[next_excluded] == i) continue;
    candidates.push_back(i);
  }
  const auto k = std::min(n, candidates.size());
  const auto better = [&](ItemIndex a, ItemIndex b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end(), better);
  std::vector<ScoredItem> ranked;
  ranked.reserve(k);
  for (std::size_t r = 0; r < k; ++r) ranked.push_back({candidates[r], scores[candidates[r]]});
  return ranked;
}

// ---------------------------------------------------------------------------
// TrainedModel

TrainedModel::TrainedModel(ModelConfig config, KeyIndexPtr items, std::shared_ptr<const PropagationMatrix> propagation,
                           ItemEmbeddings x0)
    : config_(std::move(config)),
      items_(std::move(items)),
      propagation_(std::move(propagation)),
      x0_(std::move(x0)),
      cache_(std::make_shared<Cache>()) {
  if (!items_ || !propagation_) throw InvalidArgument("TrainedModel: null item table or propagation matrix");
  const auto n = static_cast<std::size_t>(x0_.rows());
  if (items_->size() != n) {
    throw DimensionMismatch("TrainedModel: " + std::to_string(items_->size()) + " item keys for " + std::to_string(n) +
                            " embedding rows");
  }
  if (propagation_->n_items() != n) throw DimensionMismatch("TrainedModel: propagation size differs from item count");
  if (config_.dim != static_cast<std::size_t>(x0_.cols())) {
    throw DimensionMismatch("TrainedModel: config dim " + std::to_string(config_.dim) + " but embeddings have " +
                            std::to_string(x0_.cols()) + " columns");
  }
  if (!x0_.allFinite()) throw InvalidArgument("TrainedModel: non-finite item embeddings");
}

const ItemEmbeddings& TrainedModel::convolved_items() const {
  std::call_once(cache_->once, [this] { cache_->value = propagate(*propagation_, x0_, config_.depth); });
  return cache_->value;
}

UserEmbedding TrainedModel::embed_profile(std::span<const ItemIndex> items) const {
  return embed_user(make_profile(items, config_.weighting), convolved_items());
}

std::vector<double> TrainedModel::score_all(const UserEmbedding& user) const {
  const auto& x = convolved_items();
  if (user.vector.size() != x.cols()) throw DimensionMismatch("score_all: user embedding size differs from d");
  std::vector<double> scores(static_cast<std::size_t>(x.rows()));
  Eigen::Map<Eigen::VectorXd> out(scores.data(), x.rows());
  out.noalias() = x * user.vector.transpose();
  return scores;
}

std::vector<double> TrainedModel::score_all(std::span<const ItemIndex> items) const {
  return score_all(embed_profile(items));
}

std::vector<ScoredItem> TrainedModel::recommend(std::span<const ItemIndex> items, std::size_t n,
                                                bool exclude_profile) const {
  if (n < 1) throw InvalidArgument("recommend: N must be >= 1");
  std::vector<ItemIndex> profile(items.begin(), items.end());
  std::sort(profile.begin(), profile.end());
  profile.erase(std::unique(profile.begin(), profile.end()), profile.end());
  const auto scores = score_all(profile);
  return top_n(scores, n, exclude_profile ? std::span<const ItemIndex>(profile) : std::span<const ItemIndex>());
}

ItemEmbeddings convolved_items(const TrainedModel& model) { return model.convolved_items(); }

}  // namespace igccf
