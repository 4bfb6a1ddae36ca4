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

// Item embeddings, profile-sum user embeddings, scoring and ranking. A
// TrainedModel is enough to serve users that were never seen in training.

#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "igccf/data.hpp"
#include "igccf/graph.hpp"
#include "igccf/types.hpp"

namespace igccf {

// How lambda_ui is assigned. Uniform: 1 for every interaction. Mean: 1/|profile|.
enum class ProfileWeighting { Uniform, Mean };

struct ProfileEntry {
  ItemIndex item;
  double weight;

  friend bool operator==(const ProfileEntry&, const ProfileEntry&) = default;
};
using Profile = std::vector<ProfileEntry>;

Profile make_profile(std::span<const ItemIndex> items, ProfileWeighting weighting = ProfileWeighting::Uniform);

struct UserEmbedding {
  Vector vector;
  std::size_t source_profile_size = 0;

  // Set when the profile was empty and the embedding is the zero vector.
  bool empty_profile() const { return source_profile_size == 0; }
};

// x_u = sum_i lambda_ui x_i. Throws InvalidArgument on an out-of-range item.
UserEmbedding embed_user(std::span<const ProfileEntry> profile, const ItemEmbeddings& items);

// R~ = R (.) Lambda as a sparse U x I matrix.
SparseMatrix weighted_interactions(const InteractionMatrix& matrix,
                                   ProfileWeighting weighting = ProfileWeighting::Uniform);
// U = R~ X. Throws DimensionMismatch.
DenseMatrix embed_all_users(const SparseMatrix& weighted, const ItemEmbeddings& items);

double score(const Eigen::Ref<const Vector>& user, const Eigen::Ref<const Vector>& item);

struct ScoredItem {
  ItemIndex item;
  double score;

  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

// Best `n` items by score (descending, ties to the lower index), skipping
// `excluded` which must be sorted ascending.
std::vector<ScoredItem> top_n(std::span<const double> scores, std::size_t n,
                              std::span<const ItemIndex> excluded = {});

struct ModelConfig {
  std::size_t dim = 64;
  std::size_t depth = 1;
  std::optional<std::size_t> top_k = 20;  // nullopt: unpruned graph
  double dropout = 0.2;
  double l2 = 1e-5;
  PropagationOptions propagation;
  ProfileWeighting weighting = ProfileWeighting::Uniform;
};

class TrainedModel {
 public:
  // Throws DimensionMismatch if x0 / propagation / item table disagree, and
  // InvalidArgument on non-finite embeddings.
  TrainedModel(ModelConfig config, KeyIndexPtr items, std::shared_ptr<const PropagationMatrix> propagation,
               ItemEmbeddings x0);

  const ModelConfig& config() const { return config_; }
  const KeyIndex& items() const { return *items_; }
  const KeyIndexPtr& item_index() const { return items_; }
  const PropagationMatrix& propagation() const { return *propagation_; }
  const std::shared_ptr<const PropagationMatrix>& propagation_ptr() const { return propagation_; }
  std::size_t n_items() const { return static_cast<std::size_t>(x0_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(x0_.cols()); }

  const ItemEmbeddings& base_embeddings() const { return x0_; }
  // X^(k), computed on first use and cached; thread-safe.
  const ItemEmbeddings& convolved_items() const;

  UserEmbedding embed_profile(std::span<const ItemIndex> items) const;
  // Scores of every item against the user built from `items`.
  std::vector<double> score_all(std::span<const ItemIndex> items) const;
  std::vector<double> score_all(const UserEmbedding& user) const;

  // Top-n from the profile-derived embedding. `items` need not be sorted.
  std::vector<ScoredItem> recommend(std::span<const ItemIndex> items, std::size_t n,
                                    bool exclude_profile = true) const;

 private:
  struct Cache {
    std::once_flag once;
    ItemEmbeddings value;
  };

  ModelConfig config_;
  KeyIndexPtr items_;
  std::shared_ptr<const PropagationMatrix> propagation_;
  ItemEmbeddings x0_;
  std::shared_ptr<Cache> cache_;
};

ItemEmbeddings convolved_items(const TrainedModel& model);

// Binary model file: header (magic, version, d, k, K, p, l2, flags, I), item
// key table, X^(0) as little-endian f32 row-major, P as (u32, u32, f64) triples.
void save_model(std::ostream& out, const TrainedModel& model);
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(std::istream& in);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace igccf
