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

// Synthetic block-structured interaction data for the benchmarks.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "igccf/data.hpp"

namespace igccf::bench {

inline InteractionMatrix block_matrix(std::size_t n_users, std::size_t n_items, std::size_t per_user,
                                      std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  const std::size_t blocks = 8;
  std::vector<std::string> users, items;
  for (std::size_t u = 0; u < n_users; ++u) users.push_back("u" + std::to_string(u));
  for (std::size_t i = 0; i < n_items; ++i) items.push_back("i" + std::to_string(i));
  std::vector<std::vector<ItemIndex>> rows(n_users);
  std::uniform_int_distribution<std::size_t> any(0, n_items - 1);
  for (std::size_t u = 0; u < n_users; ++u) {
    const std::size_t block = u % blocks;
    auto& row = rows[u];
    while (row.size() < per_user) {
      // Three quarters of the picks land inside the user's block.
      std::size_t i = any(rng);
      if (rng() % 4 != 0) i = (i / blocks) * blocks + block;
      if (i >= n_items) continue;
      row.push_back(static_cast<ItemIndex>(i));
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
    }
  }
  return InteractionMatrix(std::make_shared<const KeyIndex>(std::move(users)),
                           std::make_shared<const KeyIndex>(std::move(items)), std::move(rows));
}

}  // namespace igccf::bench
