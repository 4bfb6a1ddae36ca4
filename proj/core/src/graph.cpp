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

#include "igccf/graph.hpp"

#include <algorithm>
#include <cmath>

#include "igccf/errors.hpp"

namespace igccf {

ItemGraph::ItemGraph(std::size_t n_items, std::vector<std::vector<WeightedEdge>> rows,
                     std::optional<std::size_t> pruned_k)
    : rows_(std::move(rows)), pruned_k_(pruned_k) {
  if (rows_.size() != n_items) throw InvalidArgument("ItemGraph: row count does not match n_items");
  for (ItemIndex i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    for (std::size_t k = 0; k < r.size(); ++k) {
      const auto& e = r[k];
      if (e.neighbor >= n_items) throw InvalidArgument("ItemGraph: neighbour out of range in row " + std::to_string(i));
      if (e.neighbor == i) throw InvalidArgument("ItemGraph: self edge in row " + std::to_string(i));
      if (!(e.weight > 0.0 && e.weight <= 1.0)) {
        throw InvalidArgument("ItemGraph: weight outside (0, 1] in row " + std::to_string(i));
      }
      if (k > 0 && e.neighbor <= r[k - 1].neighbor) {
        throw InvalidArgument("ItemGraph: row " + std::to_string(i) + " not sorted by neighbour");
      }
    }
  }
}

std::size_t ItemGraph::n_edges() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

bool ItemGraph::is_symmetric() const {
  for (ItemIndex i = 0; i < rows_.size(); ++i) {
    for (const auto& e : rows_[i]) {
      const auto& back = rows_[e.neighbor];
      auto it = std::lower_bound(back.begin(), back.end(), i,
                                 [](const WeightedEdge& edge, ItemIndex key) { return edge.neighbor < key; });
      if (it == back.end() || it->neighbor != i || it->weight != e.weight) return false;
    }
  }
  return true;
}

namespace {

// Heavier first, then lower neighbour index.
bool stronger(const WeightedEdge& a, const WeightedEdge& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  return a.neighbor < b.neighbor;
}

void keep_strongest(std::vector<WeightedEdge>& row, std::size_t k) {
  if (row.size() <= k) return;
  std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), row.end(), stronger);
  row.resize(k);
  std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.neighbor < b.neighbor; });
}

// One row of the cosine projection: co-occurrence counts with every other
// item, normalised by the column norms. `counts` is an all-zero scratch
// buffer of size I on entry and on exit.
std::vector<WeightedEdge> cosine_row(ItemIndex i, const InteractionMatrix& matrix,
                                     const std::vector<std::vector<UserIndex>>& columns, std::vector<std::uint32_t>& counts,
                                     std::vector<ItemIndex>& touched) {
  touched.clear();
  for (UserIndex u : columns[i]) {
    for (ItemIndex j : matrix.row(u)) {
      if (j == i) continue;
      if (counts[j]++ == 0) touched.push_back(j);
    }
  }
  std::sort(touched.begin(), touched.end());
  std::vector<WeightedEdge> row;
  row.reserve(touched.size());
  const double deg_i = static_cast<double>(columns[i].size());
  for (ItemIndex j : touched) {
    const double deg_j = static_cast<double>(columns[j].size());
    // sqrt of an exact integer product keeps w_ij == w_ji bitwise.
    row.push_back({j, static_cast<double>(counts[j]) / std::sqrt(deg_i * deg_j)});
    counts[j] = 0;
  }
  return row;
}

std::vector<std::vector<UserIndex>> checked_columns(const InteractionMatrix& matrix, bool allow_empty_items) {
  auto columns = matrix.columns();
  if (allow_empty_items) return columns;
  for (ItemIndex i = 0; i < columns.size(); ++i) {
    if (columns[i].empty()) {
      throw InvalidArgument("project_cosine: item '" + matrix.items().key(i) + "' has no interactions");
    }
  }
  return columns;
}

}  // namespace

ItemGraph project_cosine(const InteractionMatrix& matrix, bool allow_empty_items) {
  const auto columns = checked_columns(matrix, allow_empty_items);
  std::vector<std::uint32_t> counts(matrix.n_items(), 0);
  std::vector<ItemIndex> touched;
  std::vector<std::vector<WeightedEdge>> rows(matrix.n_items());
  for (ItemIndex i = 0; i < rows.size(); ++i) rows[i] = cosine_row(i, matrix, columns, counts, touched);
  return ItemGraph(matrix.n_items(), std::move(rows));
}

ItemGraph topk_prune(const ItemGraph& graph, std::size_t k) {
  if (k < 1) throw InvalidArgument("topk_prune: K must be >= 1");
  auto rows = graph.rows();
  for (auto& r : rows) keep_strongest(r, k);
  return ItemGraph(graph.n_items(), std::move(rows), k);
}

ItemGraph project_cosine_topk(const InteractionMatrix& matrix, std::size_t k, bool allow_empty_items) {
  if (k < 1) throw InvalidArgument("project_cosine_topk: K must be >= 1");
  const auto columns = checked_columns(matrix, allow_empty_items);
  std::vector<std::uint32_t> counts(matrix.n_items(), 0);
  std::vector<ItemIndex> touched;
  std::vector<std::vector<WeightedEdge>> rows(matrix.n_items());
  for (ItemIndex i = 0; i < rows.size(); ++i) {
    rows[i] = cosine_row(i, matrix, columns, counts, touched);
    keep_strongest(rows[i], k);
    rows[i].shrink_to_fit();
  }
  return ItemGraph(matrix.n_items(), std::move(rows), k);
}

// ---------------------------------------------------------------------------
// PropagationMatrix

PropagationMatrix::PropagationMatrix(std::size_t n_items, std::span<const Triplet> entries) {
  std::vector<Eigen::Triplet<double>> coo;
  coo.reserve(entries.size());
  std::vector<std::pair<ItemIndex, ItemIndex>> seen;
  seen.reserve(entries.size());
  for (const auto& t : entries) {
    if (t.row >= n_items || t.col >= n_items) throw InvalidArgument("PropagationMatrix: entry out of range");
    if (!std::isfinite(t.weight) || t.weight < 0.0) {
      throw InvalidArgument("PropagationMatrix: weights must be finite and >= 0");
    }
    seen.emplace_back(t.row, t.col);
    coo.emplace_back(static_cast<int>(t.row), static_cast<int>(t.col), t.weight);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    throw InvalidArgument("PropagationMatrix: duplicate entry");
  }
  const auto n = static_cast<Eigen::Index>(n_items);
  matrix_.resize(n, n);
  matrix_.setFromTriplets(coo.begin(), coo.end());
  matrix_.makeCompressed();
  transposed_ = matrix_.transpose();
  transposed_.makeCompressed();
}

std::vector<Triplet> PropagationMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(matrix_, r); it; ++it)
      out.push_back({static_cast<ItemIndex>(it.row()), static_cast<ItemIndex>(it.col()), it.value()});
  return out;
}

std::size_t PropagationMatrix::row_support(ItemIndex i) const {
  const auto* outer = matrix_.outerIndexPtr();
  return static_cast<std::size_t>(outer[i + 1] - outer[i]);
}

PropagationMatrix PropagationMatrix::identity(std::size_t n_items) {
  std::vector<Triplet> diag;
  diag.reserve(n_items);
  for (ItemIndex i = 0; i < n_items; ++i) diag.push_back({i, i, 1.0});
  return PropagationMatrix(n_items, diag);
}

PropagationMatrix build_propagation(const ItemGraph& graph, const PropagationOptions& options) {
  std::vector<Triplet> entries;
  entries.reserve(graph.n_edges() + (options.self_loop ? graph.n_items() : 0));
  for (ItemIndex i = 0; i < graph.n_items(); ++i) {
    const auto first = entries.size();
    bool self_done = !options.self_loop;
    for (const auto& e : graph.row(i)) {
      if (!self_done && e.neighbor > i) {
        entries.push_back({i, i, 1.0});
        self_done = true;
      }
      entries.push_back({i, e.neighbor, e.weight});
    }
    if (!self_done) entries.push_back({i, i, 1.0});
    if (options.row_normalize) {
      double sum = 0.0;
      for (auto k = first; k < entries.size(); ++k) sum += entries[k].weight;
      if (sum > 0.0)
        for (auto k = first; k < entries.size(); ++k) entries[k].weight /= sum;
    }
  }
  return PropagationMatrix(graph.n_items(), entries);
}

DenseMatrix propagate(const PropagationMatrix& p, const DenseMatrix& x0, std::size_t depth) {
  if (static_cast<std::size_t>(x0.rows()) != p.n_items()) {
    throw DimensionMismatch("propagate: embeddings have " + std::to_string(x0.rows()) + " rows, P has " +
                            std::to_string(p.n_items()));
  }
  DenseMatrix x = x0;
  for (std::size_t k = 0; k < depth; ++k) {
    DenseMatrix next = p.matrix() * x;
    x.swap(next);
  }
  return x;
}

DenseMatrix propagate_transposed(const PropagationMatrix& p, const DenseMatrix& g, std::size_t depth) {
  if (static_cast<std::size_t>(g.rows()) != p.n_items()) {
    throw DimensionMismatch("propagate_transposed: gradient has " + std::to_string(g.rows()) + " rows, P has " +
                            std::to_string(p.n_items()));
  }
  DenseMatrix x = g;
  for (std::size_t k = 0; k < depth; ++k) {
    DenseMatrix next = p.transposed() * x;
    x.swap(next);
  }
  return x;
}

}  // namespace igccf
