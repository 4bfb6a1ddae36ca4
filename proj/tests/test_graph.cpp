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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <tuple>

#include "igccf/errors.hpp"
#include "igccf/graph.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace igccf {
namespace {

using testing::make_matrix;

double weight_of(const ItemGraph& g, ItemIndex i, ItemIndex j) {
  for (const auto& e : g.row(i))
    if (e.neighbor == j) return e.weight;
  return 0.0;
}

std::vector<std::vector<int>> random_table(std::mt19937_64& rng, std::size_t users, std::size_t items, double density) {
  std::uniform_real_distribution<double> unit(0, 1);
  std::vector<std::vector<int>> t(users, std::vector<int>(items, 0));
  for (auto& row : t)
    for (auto& c : row) c = unit(rng) < density;
  // Keep every column non-empty.
  for (std::size_t i = 0; i < items; ++i) t[rng() % users][i] = 1;
  return t;
}

InteractionMatrix from_table(const std::vector<std::vector<int>>& t) {
  std::vector<std::vector<ItemIndex>> rows(t.size());
  for (std::size_t u = 0; u < t.size(); ++u)
    for (std::size_t i = 0; i < t[u].size(); ++i)
      if (t[u][i]) rows[u].push_back(static_cast<ItemIndex>(i));
  return make_matrix(rows, t.front().size());
}

TEST(ProjectCosine, HandExamples) {
  // Columns over users: i0 = (1,1,0), i1 = (1,0,1), i2 = (1,1,0), i3 = (0,0,1).
  const auto m = make_matrix({{0, 1, 2}, {0, 2}, {1, 3}}, 4);
  const auto g = project_cosine(m);
  EXPECT_DOUBLE_EQ(weight_of(g, 0, 2), 1.0);
  EXPECT_DOUBLE_EQ(weight_of(g, 0, 1), 0.5);
  EXPECT_DOUBLE_EQ(weight_of(g, 0, 3), 0.0);
  EXPECT_TRUE(g.is_symmetric());
  EXPECT_FALSE(g.pruned_k().has_value());
}

TEST(ProjectCosine, EmptyColumnRejectedUnlessAllowed) {
  const auto m = make_matrix({{0, 1}}, 3);
  EXPECT_THROW(project_cosine(m), InvalidArgument);
  const auto g = project_cosine(m, /*allow_empty_items=*/true);
  EXPECT_TRUE(g.row(2).empty());
  EXPECT_THROW(project_cosine_topk(m, 2), InvalidArgument);
}

TEST(ProjectCosine, MatchesDenseOracleSymmetricAndBounded) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = random_table(rng, 2 + rng() % 15, 2 + rng() % 20, 0.3);
    const auto g = project_cosine(from_table(t));
    const auto w = testing::dense_cosine(t);
    EXPECT_TRUE(g.is_symmetric());
    for (ItemIndex i = 0; i < g.n_items(); ++i) {
      std::size_t nonzero = 0;
      for (ItemIndex j = 0; j < g.n_items(); ++j) {
        if (w(i, j) > 0) ++nonzero;
        EXPECT_NEAR(weight_of(g, i, j), w(i, j), 1e-15);
      }
      EXPECT_EQ(g.row(i).size(), nonzero);
      for (const auto& e : g.row(i)) {
        EXPECT_GT(e.weight, 0.0);
        EXPECT_LE(e.weight, 1.0);
      }
    }
  }
}

TEST(TopkPrune, HandExamples) {
  const ItemGraph g(3, {{{1, 0.9}, {2, 0.5}}, {{0, 0.9}}, {{0, 0.5}}});
  const auto p = topk_prune(g, 1);
  ASSERT_EQ(p.row(0).size(), 1u);
  EXPECT_EQ(p.row(0)[0].neighbor, 1u);
  EXPECT_EQ(p.pruned_k(), 1u);

  const ItemGraph tie(3, {{{1, 0.7}, {2, 0.7}}, {{0, 0.7}}, {{0, 0.7}}});
  EXPECT_EQ(topk_prune(tie, 1).row(0)[0].neighbor, 1u);

  EXPECT_EQ(topk_prune(g, 5).rows(), g.rows());
  EXPECT_THROW(topk_prune(g, 0), InvalidArgument);
}

TEST(TopkPrune, FusedProjectionEqualsProjectThenPrune) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = from_table(random_table(rng, 2 + rng() % 15, 2 + rng() % 25, 0.35));
    const std::size_t k = 1 + rng() % 6;
    const auto fused = project_cosine_topk(m, k);
    const auto split = topk_prune(project_cosine(m), k);
    ASSERT_EQ(fused.rows(), split.rows());
    EXPECT_EQ(fused.pruned_k(), k);
  }
}

TEST(Propagation, BuildRules) {
  const ItemGraph edgeless(3, {{}, {}, {}});
  const auto id = build_propagation(edgeless);
  EXPECT_TRUE(DenseMatrix(id.matrix()).isApprox(DenseMatrix::Identity(3, 3)));

  const ItemGraph single(2, {{{1, 0.5}}, {}});
  const auto p = build_propagation(single);
  const DenseMatrix dense(p.matrix());
  EXPECT_DOUBLE_EQ(dense(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(dense(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(dense(1, 0), 0.0);
  EXPECT_EQ(p.row_support(0), 2u);

  const auto no_loop = build_propagation(single, {.self_loop = false, .row_normalize = false});
  EXPECT_EQ(no_loop.nnz(), 1u);

  const ItemGraph two(2, {{{1, 0.5}}, {{0, 0.5}}});
  const DenseMatrix norm(build_propagation(two, {.self_loop = true, .row_normalize = true}).matrix());
  EXPECT_NEAR(norm.row(0).sum(), 1.0, 1e-15);
  EXPECT_NEAR(norm(0, 1), 0.5 / 1.5, 1e-15);
}

TEST(Propagation, PrunedRowSupport) {
  const auto m = testing::block_dataset({.n_users = 200, .n_items = 120, .n_blocks = 4, .in_block = 0.5});
  const std::size_t k = 20;
  const auto p = build_propagation(project_cosine_topk(m, k));
  for (ItemIndex i = 0; i < p.n_items(); ++i) EXPECT_LE(p.row_support(i), k + 1);
}

TEST(Propagate, DepthZeroAndIdentity) {
  std::mt19937_64 rng(1);
  const DenseMatrix x = DenseMatrix::Random(6, 3);
  const auto id = PropagationMatrix::identity(6);
  EXPECT_EQ(propagate(id, x, 0), x);
  EXPECT_EQ(propagate(id, x, 3), x);
  const auto m = testing::block_dataset({.n_users = 10, .n_items = 6});
  const auto p = build_propagation(project_cosine(m));
  EXPECT_EQ(propagate(p, x, 0), x);
  EXPECT_THROW(propagate(p, DenseMatrix::Zero(5, 3), 1), DimensionMismatch);
}

TEST(Propagate, TwoStepHandProduct) {
  const std::vector<Triplet> entries{{0, 0, 1.0}, {0, 1, 0.5}, {1, 1, 1.0}, {1, 2, 0.25}, {2, 0, 0.3}, {2, 2, 1.0},
                                     {3, 3, 1.0}, {3, 0, 0.7}};
  const PropagationMatrix p(4, entries);
  DenseMatrix x(4, 3);
  x << 1, 2, 3, 4, 5, 6, 7, 8, 9, -1, -2, -3;
  DenseMatrix pd = DenseMatrix::Zero(4, 4);
  for (const auto& t : entries) pd(t.row, t.col) = t.weight;
  const DenseMatrix expected = (pd * pd) * x;
  EXPECT_LT((propagate(p, x, 2) - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Propagate, LinearityAndAdjoint) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = from_table(random_table(rng, 10, 12, 0.3));
    const auto p = build_propagation(project_cosine_topk(m, 4));
    const DenseMatrix x = DenseMatrix::Random(12, 3), y = DenseMatrix::Random(12, 3);
    const double a = 0.7, b = -1.3;
    const auto k = static_cast<std::size_t>(trial % 4);
    const DenseMatrix lhs = propagate(p, a * x + b * y, k);
    const DenseMatrix rhs = a * propagate(p, x, k) + b * propagate(p, y, k);
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
    // <P^k x, y> = <x, (P^T)^k y>
    const double left = (propagate(p, x, k).array() * y.array()).sum();
    const double right = (x.array() * propagate_transposed(p, y, k).array()).sum();
    EXPECT_NEAR(left, right, 1e-9 * std::max(1.0, std::abs(left)));
  }
}

TEST(PropagationMatrix, RejectsBadEntries) {
  EXPECT_THROW(PropagationMatrix(2, std::vector<Triplet>{{0, 2, 1.0}}), InvalidArgument);
  EXPECT_THROW(PropagationMatrix(2, std::vector<Triplet>{{0, 1, -1.0}}), InvalidArgument);
  EXPECT_THROW(PropagationMatrix(2, std::vector<Triplet>{{0, 1, NAN}}), InvalidArgument);
}

}  // namespace
}  // namespace igccf
