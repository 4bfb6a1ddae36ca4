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

// Item-item graph from the cosine-weighted one-mode projection of R, top-K
// pruning, and the linear propagation X^(k) = P^k X^(0).

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "igccf/data.hpp"
#include "igccf/types.hpp"

namespace igccf {

struct WeightedEdge {
  ItemIndex neighbor;
  double weight;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

// Row-wise weighted adjacency W over items. Row i lists the neighbours item i
// aggregates from, sorted by neighbour index. The diagonal is never stored.
class ItemGraph {
 public:
  // Throws InvalidArgument on weights outside (0, 1], unsorted rows, self
  // edges or out-of-range neighbours.
  ItemGraph(std::size_t n_items, std::vector<std::vector<WeightedEdge>> rows,
            std::optional<std::size_t> pruned_k = std::nullopt);

  std::size_t n_items() const { return rows_.size(); }
  std::size_t n_edges() const;
  std::span<const WeightedEdge> row(ItemIndex i) const { return rows_.at(i); }
  const std::vector<std::vector<WeightedEdge>>& rows() const { return rows_; }
  std::optional<std::size_t> pruned_k() const { return pruned_k_; }
  // Exact (bitwise) weight symmetry.
  bool is_symmetric() const;

 private:
  std::vector<std::vector<WeightedEdge>> rows_;
  std::optional<std::size_t> pruned_k_;
};

// w_ij = |r_i . r_j| / (||r_i|| ||r_j||) over binary item columns; only pairs
// with a common user get an edge. Throws InvalidArgument on an empty column
// unless `allow_empty_items` is set, in which case such items stay isolated
// (training splits may leave an item without interactions).
ItemGraph project_cosine(const InteractionMatrix& matrix, bool allow_empty_items = false);

// Keeps, per row, the K heaviest edges; ties go to the lower neighbour index.
ItemGraph topk_prune(const ItemGraph& graph, std::size_t k);

// project_cosine followed by topk_prune without materialising all pairs.
ItemGraph project_cosine_topk(const InteractionMatrix& matrix, std::size_t k, bool allow_empty_items = false);

struct PropagationOptions {
  bool self_loop = true;
  bool row_normalize = false;

  friend bool operator==(const PropagationOptions&, const PropagationOptions&) = default;
};

struct Triplet {
  ItemIndex row;
  ItemIndex col;
  double weight;
};

// Sparse P used for aggregation: row i holds item i's kept neighbours plus the
// optional unit self-loop.
class PropagationMatrix {
 public:
  // Throws InvalidArgument on out-of-range or negative/non-finite entries.
  PropagationMatrix(std::size_t n_items, std::span<const Triplet> entries);

  std::size_t n_items() const { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t nnz() const { return static_cast<std::size_t>(matrix_.nonZeros()); }
  const SparseMatrix& matrix() const { return matrix_; }
  const SparseMatrix& transposed() const { return transposed_; }
  // Row-major coordinate list, sorted by (row, col).
  std::vector<Triplet> triplets() const;
  std::size_t row_support(ItemIndex i) const;

  static PropagationMatrix identity(std::size_t n_items);

 private:
  SparseMatrix matrix_;
  SparseMatrix transposed_;
};

PropagationMatrix build_propagation(const ItemGraph& graph, const PropagationOptions& options = {});

// P applied `depth` times; depth 0 returns x0. Throws DimensionMismatch.
DenseMatrix propagate(const PropagationMatrix& p, const DenseMatrix& x0, std::size_t depth);
// (P^T)^depth applied to g; the adjoint of propagate.
DenseMatrix propagate_transposed(const PropagationMatrix& p, const DenseMatrix& g, std::size_t depth);

}  // namespace igccf
