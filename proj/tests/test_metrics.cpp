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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "igccf/errors.hpp"
#include "igccf/metrics.hpp"
#include "igccf/protocols.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace igccf {
namespace {

std::vector<ItemIndex> sorted(std::vector<ItemIndex> v) {
  std::sort(v.begin(), v.end());
  return v;
}

TEST(Metrics, HandExamples) {
  const std::vector<ItemIndex> ranked{9, 3, 7, 4, 5};
  EXPECT_DOUBLE_EQ(recall_at_n(ranked, sorted({3, 9}), 5), 1.0);
  EXPECT_DOUBLE_EQ(recall_at_n(ranked, sorted({1, 2}), 5), 0.0);
  EXPECT_DOUBLE_EQ(recall_at_n(ranked, sorted({3, 1}), 5), 0.5);
  EXPECT_DOUBLE_EQ(ndcg_at_n(ranked, sorted({9}), 5), 1.0);
  EXPECT_DOUBLE_EQ(ndcg_at_n(ranked, sorted({1}), 5), 0.0);
  // relevant {a, b} at ranks 2 and 4.
  const double expected = (1 / std::log2(3.0) + 1 / std::log2(5.0)) / (1 + 1 / std::log2(3.0));
  EXPECT_NEAR(ndcg_at_n(ranked, sorted({3, 4}), 5), expected, 1e-15);
}

TEST(Metrics, Preconditions) {
  const std::vector<ItemIndex> ranked{1, 2};
  EXPECT_THROW(recall_at_n(ranked, {}, 5), InvalidArgument);
  EXPECT_THROW(ndcg_at_n(ranked, std::vector<ItemIndex>{1}, 0), InvalidArgument);
}

TEST(Metrics, MatchBruteForceExactly) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t catalog = 1 + rng() % 50;
    std::vector<ItemIndex> items(catalog);
    std::iota(items.begin(), items.end(), ItemIndex{0});
    std::shuffle(items.begin(), items.end(), rng);
    const std::size_t n_rel = 1 + rng() % std::min<std::size_t>(10, catalog);
    std::vector<ItemIndex> relevant(items.begin(), items.begin() + static_cast<long>(n_rel));
    std::shuffle(items.begin(), items.end(), rng);
    const std::size_t n = 1 + rng() % 60;
    const auto rel = sorted(relevant);
    ASSERT_EQ(recall_at_n(items, rel, n), testing::brute_recall(items, relevant, n));
    ASSERT_EQ(ndcg_at_n(items, rel, n), testing::brute_ndcg(items, relevant, n));
  }
}

TEST(Metrics, BoundedAndMonotoneUnderImprovement) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ItemIndex> ranked(30);
    std::iota(ranked.begin(), ranked.end(), ItemIndex{0});
    std::shuffle(ranked.begin(), ranked.end(), rng);
    const auto rel = sorted({ranked[rng() % 30], ranked[rng() % 30], ranked[rng() % 30]});
    auto relevant = rel;
    relevant.erase(std::unique(relevant.begin(), relevant.end()), relevant.end());
    const std::size_t n = 1 + rng() % 20;
    const double r0 = recall_at_n(ranked, relevant, n), d0 = ndcg_at_n(ranked, relevant, n);
    EXPECT_GE(r0, 0.0);
    EXPECT_LE(r0, 1.0);
    EXPECT_GE(d0, 0.0);
    EXPECT_LE(d0, 1.0 + 1e-15);
    // Swap one relevant item with the non-relevant item directly above it.
    for (std::size_t pos = 1; pos < ranked.size(); ++pos) {
      const bool here = std::binary_search(relevant.begin(), relevant.end(), ranked[pos]);
      const bool above = std::binary_search(relevant.begin(), relevant.end(), ranked[pos - 1]);
      if (here && !above) {
        auto better = ranked;
        std::swap(better[pos], better[pos - 1]);
        EXPECT_GE(recall_at_n(better, relevant, n), r0);
        EXPECT_GE(ndcg_at_n(better, relevant, n), d0);
        break;
      }
    }
  }
}

TEST(Metrics, NdcgOneIffTopPositionsRelevant) {
  const std::vector<ItemIndex> ranked{4, 2, 8, 1};
  EXPECT_DOUBLE_EQ(ndcg_at_n(ranked, sorted({2, 4}), 3), 1.0);
  EXPECT_LT(ndcg_at_n(ranked, sorted({2, 8}), 3), 1.0);
  EXPECT_DOUBLE_EQ(ndcg_at_n(ranked, sorted({1, 2, 4, 8, 9}), 2), 1.0);
}

TEST(MetricSpec, Parsing) {
  EXPECT_EQ(parse_metric("ndcg@20").kind, MetricKind::Ndcg);
  EXPECT_EQ(parse_metric("recall@5").cutoff, 5u);
  EXPECT_EQ(parse_metric("recall@5").name(), "recall@5");
  EXPECT_THROW(parse_metric("ndcg"), InvalidArgument);
  EXPECT_THROW(parse_metric("ndcg@0"), InvalidArgument);
  EXPECT_THROW(parse_metric("map@5"), InvalidArgument);
  EXPECT_EQ(parse_protocol("inductive"), Protocol::Inductive);
  EXPECT_THROW(parse_protocol("other"), InvalidArgument);
}

// dim 1, identity P, depth 0: scores are (sum of profile values) * x_i, so every
// user with a positive profile sum ranks items by descending x_i.
TrainedModel ordered_model() {
  ModelConfig config;
  config.dim = 1;
  config.depth = 0;
  DenseMatrix x(5, 1);
  x << 0.5, 0.4, 0.3, 0.2, 0.1;
  std::vector<std::string> keys{"a", "b", "c", "d", "e"};
  return TrainedModel(config, std::make_shared<const KeyIndex>(keys),
                      std::make_shared<const PropagationMatrix>(PropagationMatrix::identity(5)), x);
}

TEST(EvaluateUsers, HandOracle) {
  const auto model = ordered_model();
  const auto profiles = testing::make_matrix({{0}, {1}, {}, {4}}, 5);
  const auto targets = testing::make_matrix({{2, 4}, {0}, {3}, {}}, 5);
  const std::vector<std::size_t> cutoffs{2};
  const auto report = evaluate_users(model, profiles, targets, cutoffs, Protocol::Inductive);
  EXPECT_EQ(report.n_users_evaluated, 2u);
  EXPECT_EQ(report.n_users_skipped, 1u);
  EXPECT_EQ(report.protocol, Protocol::Inductive);
  // user 0 ranks [1, 2, 3, 4]; user 1 ranks [0, 2, 3, 4].
  const double ndcg0 = (1 / std::log2(3.0)) / (1 + 1 / std::log2(3.0));
  EXPECT_NEAR(report.recall(2), (0.5 + 1.0) / 2, 1e-15);
  EXPECT_NEAR(report.ndcg(2), (ndcg0 + 1.0) / 2, 1e-15);
}

TEST(EvaluateUsers, PerfectAndConstantScores) {
  // Test items first for every user.
  const auto model = ordered_model();
  const auto profiles = testing::make_matrix({{4}, {3}}, 5);
  const auto targets = testing::make_matrix({{0, 1}, {0}}, 5);
  const std::vector<std::size_t> cutoffs{1, 2, 5};
  const auto perfect = evaluate_users(model, profiles, targets, cutoffs, Protocol::Transductive);
  EXPECT_DOUBLE_EQ(perfect.ndcg(2), 1.0);
  EXPECT_DOUBLE_EQ(perfect.recall(5), 1.0);
  EXPECT_DOUBLE_EQ(perfect.recall(1), 0.75);

  ModelConfig config;
  config.dim = 1;
  config.depth = 0;
  const TrainedModel flat(config, model.item_index(), model.propagation_ptr(), DenseMatrix::Zero(5, 1));
  const auto tie = evaluate_users(flat, profiles, targets, cutoffs, Protocol::Transductive);
  // Index order: user 0 ranks [0, 1, 2, 3], user 1 ranks [0, 1, 2, 4].
  EXPECT_DOUBLE_EQ(tie.recall(1), 0.75);
  EXPECT_DOUBLE_EQ(tie.ndcg(2), 1.0);
}

TEST(EvaluateUsers, NoUsersGivesEmptyReport) {
  const auto model = ordered_model();
  const auto empty = testing::make_matrix({{}, {}}, 5);
  const std::vector<std::size_t> cutoffs{5, 20};
  const auto report = evaluate_users(model, empty, empty, cutoffs, Protocol::Inductive);
  EXPECT_EQ(report.n_users_evaluated, 0u);
  EXPECT_DOUBLE_EQ(report.ndcg(20), 0.0);
}

TEST(EvaluateTransductive, NeverRanksExcludedItems) {
  // The test item has the lowest score; it still ranks first once the
  // train and validation items are excluded.
  ModelConfig config;
  config.dim = 1;
  config.depth = 0;
  DenseMatrix x(6, 1);
  x << 0.9, 0.8, 0.7, 0.6, 0.5, 0.1;
  std::vector<std::string> keys{"a", "b", "c", "d", "e", "f"};
  const TrainedModel model(config, std::make_shared<const KeyIndex>(keys),
                           std::make_shared<const PropagationMatrix>(PropagationMatrix::identity(6)), x);
  DatasetSplit split{testing::make_matrix({{0, 1, 2}}, 6), testing::make_matrix({{3, 4}}, 6),
                     testing::make_matrix({{5}}, 6), 0, 0.5, 0.3};
  const std::vector<std::size_t> cutoffs{1};
  const auto report = evaluate_transductive(model, split, cutoffs);
  EXPECT_DOUBLE_EQ(report.recall(1), 1.0);
  EXPECT_EQ(report.protocol, Protocol::Transductive);
}

TEST(ReportOutput, TsvAndTable) {
  const auto model = ordered_model();
  const auto profiles = testing::make_matrix({{0}}, 5);
  const auto targets = testing::make_matrix({{1}}, 5);
  const std::vector<std::size_t> cutoffs{1};
  const auto report = evaluate_users(model, profiles, targets, cutoffs, Protocol::Transductive);
  std::ostringstream tsv, table;
  write_report_tsv(tsv, report);
  EXPECT_EQ(tsv.str(), "protocol\tcutoff\trecall\tndcg\tn_users\ntransductive\t1\t1.000000\t1.000000\t1\n");
  print_report_table(table, report);
  EXPECT_NE(table.str().find("Recall@N"), std::string::npos);
}

}  // namespace
}  // namespace igccf
