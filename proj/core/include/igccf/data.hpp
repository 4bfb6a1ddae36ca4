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

// Interaction ingestion, the sparse binary interaction matrix R, k-core
// filtering and the reproducible per-user / user-holdout splits.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "igccf/types.hpp"

namespace igccf {

struct InteractionRecord {
  std::string user_key;
  std::string item_key;
  std::optional<double> rating;
  std::optional<std::int64_t> timestamp;
};

// Bijection between opaque external keys and dense indices [0, size()).
class KeyIndex {
 public:
  KeyIndex() = default;
  // Throws InvalidArgument on duplicate or empty keys.
  explicit KeyIndex(std::vector<std::string> keys);

  // Returns the index of `key`, inserting it at the end if unseen.
  std::uint32_t insert(const std::string& key);
  std::optional<std::uint32_t> find(const std::string& key) const;

  const std::string& key(std::uint32_t index) const { return keys_.at(index); }
  std::span<const std::string> keys() const { return keys_; }
  std::size_t size() const { return keys_.size(); }

  friend bool operator==(const KeyIndex& a, const KeyIndex& b) { return a.keys_ == b.keys_; }

 private:
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

using KeyIndexPtr = std::shared_ptr<const KeyIndex>;

// Sparse binary user x item matrix. Every stored cell is a positive (r_ui = 1);
// rows are strictly increasing item-index lists.
class InteractionMatrix {
 public:
  // Validates row ordering and index ranges; throws InvalidArgument.
  InteractionMatrix(KeyIndexPtr users, KeyIndexPtr items, std::vector<std::vector<ItemIndex>> rows);

  std::size_t n_users() const { return rows_.size(); }
  std::size_t n_items() const { return items_->size(); }
  std::size_t nnz() const { return nnz_; }

  std::span<const ItemIndex> row(UserIndex u) const { return rows_.at(u); }
  const std::vector<std::vector<ItemIndex>>& rows() const { return rows_; }
  bool contains(UserIndex u, ItemIndex i) const;

  const KeyIndex& users() const { return *users_; }
  const KeyIndex& items() const { return *items_; }
  const KeyIndexPtr& user_index() const { return users_; }
  const KeyIndexPtr& item_index() const { return items_; }

  std::vector<std::size_t> item_degrees() const;
  // Transpose: per item, the increasing list of users holding it.
  std::vector<std::vector<UserIndex>> columns() const;
  // Users with at least one stored cell.
  std::size_t n_active_users() const;

  // Same user and item index tables (pointer- or value-equal).
  bool shares_universe_with(const InteractionMatrix& other) const;

 private:
  KeyIndexPtr users_;
  KeyIndexPtr items_;
  std::vector<std::vector<ItemIndex>> rows_;
  std::size_t nnz_ = 0;
};

// Cell-wise union; both operands must share user and item tables.
InteractionMatrix merge(const InteractionMatrix& a, const InteractionMatrix& b);

struct LoadOptions {
  // Records whose rating is below the threshold are dropped. Records with no
  // rating column are always kept as implicit positives.
  std::optional<double> positive_threshold;
  // Field delimiter; auto-detected per file among tab, "::" and comma when empty.
  std::optional<std::string> delimiter;
  // Treat the first non-comment line as a column header.
  bool skip_header = false;
};

std::vector<InteractionRecord> parse_interactions(std::istream& in, const LoadOptions& options,
                                                  const std::string& source_name = "<stream>");
// Throws Error if the file is missing, ParseError on malformed lines and
// EmptyDatasetError when no record survives.
std::vector<InteractionRecord> load_interactions(const std::filesystem::path& path,
                                                 const LoadOptions& options = {});

// Dense indices are assigned in first-appearance order; duplicates collapse.
InteractionMatrix build_matrix(std::span<const InteractionRecord> records);

// Maximal submatrix where every user and item has degree >= k. Surviving keys
// keep their relative order. Throws EmptyDatasetError if nothing survives.
InteractionMatrix kcore_filter(const InteractionMatrix& matrix, std::size_t k);

struct DatasetSplit {
  InteractionMatrix train;
  InteractionMatrix validation;
  InteractionMatrix test;
  std::uint64_t seed = 0;
  double train_frac = 0.0;
  double val_frac = 0.0;
};

// Per-user shuffle and partition into round(n*train)/round(n*val)/rest cells,
// with validation and test holding at least one cell each.
DatasetSplit split_per_user(const InteractionMatrix& matrix, double train_frac, double val_frac,
                            std::uint64_t seed);

struct UserHoldoutSplit {
  InteractionMatrix train_users;   // seen users, full profiles
  InteractionMatrix unseen_build;  // unseen users, profile part used to embed them
  InteractionMatrix unseen_eval;   // unseen users, held-out part
  std::vector<UserIndex> unseen_users;  // increasing
  std::uint64_t seed = 0;
  double unseen_frac = 0.0;
  double profile_build_frac = 0.0;
};

// All three parts keep the full user and item tables; rows of users outside a
// part are empty.
UserHoldoutSplit split_user_holdout(const InteractionMatrix& matrix, double unseen_frac,
                                    double profile_build_frac, std::uint64_t seed);

// Counts per part for a split, round(x) is half-up.
struct SplitCounts {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};
SplitCounts per_user_split_counts(std::size_t n, double train_frac, double val_frac);

}  // namespace igccf
