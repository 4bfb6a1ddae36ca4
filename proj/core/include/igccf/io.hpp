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

// On-disk layout for matrices and splits that share one user/item universe.

#pragma once

#include <filesystem>
#include <ostream>

#include "igccf/data.hpp"
#include "igccf/graph.hpp"

namespace igccf {

// One key per line, in index order.
void write_keys(const std::filesystem::path& path, const KeyIndex& keys);
KeyIndex read_keys(const std::filesystem::path& path);

// "user<TAB>item" lines using external keys; users and items in index order.
void write_interactions(std::ostream& out, const InteractionMatrix& matrix);
void write_interactions(const std::filesystem::path& path, const InteractionMatrix& matrix);
// Reads a file written by write_interactions, resolving keys against the given
// universe. Unknown keys are a ParseError.
InteractionMatrix read_interactions(const std::filesystem::path& path, KeyIndexPtr users,
                                    KeyIndexPtr items);

// Directory layout: users.tsv, items.tsv, train.tsv, validation.tsv, test.tsv, split.header
void write_split(const std::filesystem::path& dir, const DatasetSplit& split);
DatasetSplit read_split(const std::filesystem::path& dir);

// Directory layout: users.tsv, items.tsv, train_users.tsv, unseen_build.tsv,
// unseen_eval.tsv, split.header
void write_holdout(const std::filesystem::path& dir, const UserHoldoutSplit& split);
UserHoldoutSplit read_holdout(const std::filesystem::path& dir);

// "row<TAB>col<TAB>weight" with item keys, for inspection.
void write_edge_list(const std::filesystem::path& path, const ItemGraph& graph, const KeyIndex& items);

}  // namespace igccf
