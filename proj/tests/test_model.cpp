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

#include <random>

#include "igccf/errors.hpp"
#include "igccf/model.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace igccf {
namespace {

KeyIndexPtr item_keys(std::size_t n) {
  std::vector<std::string> keys;
  for (std::size_t i = 0; i < n; ++i) keys.push_back("i" + std::to_string(i));
  return std::make_shared<const KeyIndex>(std::move(keys));
}

TrainedModel random_model(std::size_t n_items, std::size_t dim, std::size_t depth, std::uint64_t seed) {
  const auto m = testing::block_dataset({.n_users = 3 * n_items, .n_items = n_items, .seed = seed});
  auto p = std::make_shared<const PropagationMatrix>(build_propagation(project_cosine(m, true)));
  std::srand(static_cast<unsigned>(seed));
  ModelConfig config;
  config.dim = dim;
  config.depth = depth;
  return TrainedModel(config, m.item_index(), p, DenseMatrix::Random(static_cast<Eigen::Index>(n_items), static_cast<Eigen::Index>(dim)));
}

TEST(EmbedUser, SumsOfRows) {
  DenseMatrix x(3, 2);
  x << 1, 2, 3, 4, 5, 6;
  const auto single = embed_user(make_profile(std::vector<ItemIndex>{1}), x);
  EXPECT_EQ(single.vector, x.row(1));
  const auto pair = embed_user(make_profile(std::vector<ItemIndex>{0, 2}), x);
  EXPECT_EQ(pair.vector, x.row(0) + x.row(2));
  EXPECT_EQ(pair.source_profile_size, 2u);
  const auto empty = embed_user(Profile{}, x);
  EXPECT_TRUE(empty.empty_profile());
  EXPECT_EQ(empty.vector, Vector::Zero(2));
  EXPECT_THROW(embed_user(make_profile(std::vector<ItemIndex>{3}), x), InvalidArgument);
}

TEST(EmbedUser, MeanWeighting) {
  DenseMatrix x(2, 1);
  x << 2, 4;
  const auto u = embed_user(make_profile(std::vector<ItemIndex>{0, 1}, ProfileWeighting::Mean), x);
  EXPECT_DOUBLE_EQ(u.vector(0), 3.0);
}

TEST(EmbedAllUsers, IdentityAndColumnSum) {
  const DenseMatrix x = DenseMatrix::Random(4, 3);
  const auto diag = testing::make_matrix({{0}, {1}, {2}, {3}}, 4);
  EXPECT_EQ(embed_all_users(weighted_interactions(diag), x), x);
  const auto everything = testing::make_matrix({{0, 1, 2, 3}}, 4);
  const DenseMatrix u = embed_all_users(weighted_interactions(everything), x);
  EXPECT_LT((u.row(0) - x.colwise().sum()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(embed_all_users(weighted_interactions(diag), DenseMatrix::Zero(3, 3)), DimensionMismatch);
}

TEST(EmbedAllUsers, MatchesPerUserLoopOracle) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<ItemIndex>> rows(5);
    for (auto& r : rows)
      for (ItemIndex i = 0; i < 4; ++i)
        if (unit(rng) < 0.5) r.push_back(i);
    const auto m = testing::make_matrix(rows, 4);
    const DenseMatrix x = DenseMatrix::Random(4, 3);
    for (auto w : {ProfileWeighting::Uniform, ProfileWeighting::Mean}) {
      const DenseMatrix u = embed_all_users(weighted_interactions(m, w), x);
      for (UserIndex user = 0; user < 5; ++user) {
        Vector expected = Vector::Zero(3);
        const double lambda = w == ProfileWeighting::Mean && !m.row(user).empty() ? 1.0 / m.row(user).size() : 1.0;
        for (auto i : m.row(user)) expected += lambda * x.row(i);
        EXPECT_LT((u.row(user) - expected).cwiseAbs().maxCoeff(), 1e-12);
        // The transductive row and the inductive path agree bitwise.
        EXPECT_EQ(u.row(user), embed_user(make_profile(m.row(user), w), x).vector);
      }
    }
  }
}

TEST(Score, DotProduct) {
  Vector e1 = Vector::Zero(4);
  e1(0) = 1.0;
  EXPECT_DOUBLE_EQ(score(e1, e1), 1.0);
  EXPECT_DOUBLE_EQ(score(Vector::Zero(4), Vector::Random(4)), 0.0);
  const Vector a = Vector::Random(5), b = Vector::Random(5);
  double oracle = 0.0;
  for (int c = 0; c < 5; ++c) oracle += a(c) * b(c);
  EXPECT_NEAR(score(a, b), oracle, 1e-15);
  EXPECT_DOUBLE_EQ(score(a, b), score(b, a));
}

TEST(TopN, TiesToLowerIndexAndExclusion) {
  const std::vector<double> s{0.5, 0.9, 0.5, 0.1};
  const auto r = top_n(s, 10);
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[0].item, 1u);
  EXPECT_EQ(r[1].item, 0u);
  EXPECT_EQ(r[2].item, 2u);
  const std::vector<ItemIndex> excluded{1};
  EXPECT_EQ(top_n(s, 1, excluded).at(0).item, 0u);
  const std::vector<ItemIndex> all{0, 1, 2, 3};
  EXPECT_TRUE(top_n(s, 3, all).empty());
}

TEST(Recommend, MatchesFullSortOracle) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto model = random_model(12, 4, seed % 3, seed);
    const std::vector<ItemIndex> profile{static_cast<ItemIndex>(seed % 12), static_cast<ItemIndex>((seed * 7) % 12)};
    const auto scores = model.score_all(profile);
    std::vector<ItemIndex> excluded(profile);
    const auto expected = testing::full_sort_ranking(scores, excluded);
    const auto got = model.recommend(profile, 100);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t r = 0; r < got.size(); ++r) {
      EXPECT_EQ(got[r].item, expected[r]);
      EXPECT_NE(got[r].item, profile[0]);
      EXPECT_NE(got[r].item, profile[1]);
    }
    EXPECT_EQ(model.recommend(profile, 1).size(), 1u);
    const auto with_profile = model.recommend(profile, 100, /*exclude_profile=*/false);
    EXPECT_EQ(with_profile.size(), 12u);
  }
}

TEST(Recommend, EmptyProfileRanksByIndex) {
  const auto model = random_model(8, 3, 1, 2);
  const auto r = model.recommend(std::vector<ItemIndex>{}, 8);
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_EQ(r[i].item, i);
    EXPECT_EQ(r[i].score, 0.0);
  }
}

TEST(ModelProperties, ScalingCovarianceAndIncrementalUpdate) {
  const auto model = random_model(10, 4, 2, 9);
  const auto& xk = model.convolved_items();
  const Profile base{{1, 1.0}, {4, 1.0}, {7, 1.0}};
  Profile scaled = base;
  for (auto& e : scaled) e.weight *= 2.5;
  const auto u = embed_user(base, xk).vector;
  const auto v = embed_user(scaled, xk).vector;
  EXPECT_LT((v - 2.5 * u).cwiseAbs().maxCoeff(), 1e-12);
  std::vector<double> su, sv;
  for (Eigen::Index i = 0; i < xk.rows(); ++i) {
    su.push_back(score(u, xk.row(i)));
    sv.push_back(score(v, xk.row(i)));
  }
  EXPECT_EQ(testing::full_sort_ranking(su, {}), testing::full_sort_ranking(sv, {}));

  Profile grown = base;
  grown.push_back({2, 1.0});
  const auto w = embed_user(grown, xk).vector;
  EXPECT_LT((w - u - xk.row(2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ConvolvedItems, DepthRules) {
  const auto flat = random_model(6, 3, 0, 1);
  EXPECT_EQ(flat.convolved_items(), flat.base_embeddings());
  const auto deep = random_model(6, 3, 2, 1);
  const DenseMatrix twice = propagate(deep.propagation(), propagate(deep.propagation(), deep.base_embeddings(), 1), 1);
  EXPECT_LT((deep.convolved_items() - twice).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(convolved_items(deep), deep.convolved_items());
  ModelConfig config;
  config.depth = 3;
  config.dim = 2;
  const TrainedModel id(config, item_keys(4), std::make_shared<const PropagationMatrix>(PropagationMatrix::identity(4)),
                        DenseMatrix::Random(4, 2));
  EXPECT_EQ(id.convolved_items(), id.base_embeddings());
}

TEST(TrainedModel, ValidatesShapesAndValues) {
  ModelConfig config;
  config.dim = 2;
  auto p = std::make_shared<const PropagationMatrix>(PropagationMatrix::identity(3));
  EXPECT_THROW(TrainedModel(config, item_keys(4), p, DenseMatrix::Zero(4, 2)), DimensionMismatch);
  DenseMatrix bad = DenseMatrix::Zero(3, 2);
  bad(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(TrainedModel(config, item_keys(3), p, bad), InvalidArgument);
}

TEST(InductiveConsistency, IdenticalProfilesGiveIdenticalRankings) {
  const auto m = testing::block_dataset({.n_users = 30, .n_items = 20});
  auto p = std::make_shared<const PropagationMatrix>(build_propagation(project_cosine_topk(m, 5)));
  ModelConfig config;
  config.dim = 8;
  config.depth = 2;
  const TrainedModel model(config, m.item_index(), p, DenseMatrix::Random(20, 8));
  const DenseMatrix all = embed_all_users(weighted_interactions(m), model.convolved_items());
  for (UserIndex u = 0; u < m.n_users(); ++u) {
    const auto inductive = model.embed_profile(m.row(u));
    EXPECT_EQ(inductive.vector, all.row(u));
    const std::vector<ItemIndex> copy(m.row(u).begin(), m.row(u).end());
    EXPECT_EQ(model.recommend(copy, 20), model.recommend(m.row(u), 20));
  }
}

}  // namespace
}  // namespace igccf
