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

#include "synthetic.hpp"

#include <algorithm>
#include <random>

namespace igccf::testing {

InteractionMatrix make_matrix(std::vector<std::vector<ItemIndex>> rows, std::size_t n_items) {
  std::vector<std::string> user_keys, item_keys;
  for (std::size_t u = 0; u < rows.size(); ++u) user_keys.push_back("u" + std::to_string(u));
  for (std::size_t i = 0; i < n_items; ++i) item_keys.push_back("i" + std::to_string(i));
  for (auto& row : rows) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return InteractionMatrix(std::make_shared<const KeyIndex>(std::move(user_keys)),
                           std::make_shared<const KeyIndex>(std::move(item_keys)), std::move(rows));
}

InteractionMatrix block_dataset(const BlockOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<ItemIndex>> rows(options.n_users);
  for (std::size_t u = 0; u < options.n_users; ++u) {
    const auto block = u % options.n_blocks;
    std::vector<ItemIndex> in_block;
    for (std::size_t i = 0; i < options.n_items; ++i) {
      const bool same = i % options.n_blocks == block;
      if (same) in_block.push_back(static_cast<ItemIndex>(i));
      if (unit(rng) < (same ? options.in_block : options.out_block)) rows[u].push_back(static_cast<ItemIndex>(i));
    }
    std::shuffle(in_block.begin(), in_block.end(), rng);
    for (std::size_t t = 0; t < in_block.size() && rows[u].size() < options.min_per_user; ++t) {
      if (std::find(rows[u].begin(), rows[u].end(), in_block[t]) == rows[u].end()) rows[u].push_back(in_block[t]);
    }
  }
  return make_matrix(std::move(rows), options.n_items);
}

}  // namespace igccf::testing
