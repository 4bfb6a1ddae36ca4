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

#include <benchmark/benchmark.h>

#include <array>

#include "bench_data.hpp"
#include "igccf/protocols.hpp"

namespace igccf {
namespace {

TrainedModel untrained(const InteractionMatrix& m) {
  ModelConfig config;
  config.dim = 64;
  config.depth = 1;
  auto p = std::make_shared<const PropagationMatrix>(build_propagation(project_cosine_topk(m, 20, true)));
  return TrainedModel(config, m.item_index(), p, init_embeddings(m.n_items(), config.dim, 1));
}

void BM_EvaluateTransductive(benchmark::State& state) {
  const auto m = bench::block_matrix(static_cast<std::size_t>(state.range(0)), 3000, 40);
  const auto split = split_per_user(m, 0.8, 0.1, 1);
  const auto model = untrained(split.train);
  const std::array<std::size_t, 2> cutoffs{5, 20};
  for (auto _ : state) {
    auto r = evaluate_transductive(model, split, cutoffs);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluateTransductive)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_RecommendUnseenUser(benchmark::State& state) {
  const auto m = bench::block_matrix(2000, 3000, 40);
  const auto model = untrained(m);
  (void)model.convolved_items();
  const auto profile = m.row(7);
  for (auto _ : state) {
    auto top = model.recommend(profile, 20);
    benchmark::DoNotOptimize(top.data());
  }
}
BENCHMARK(BM_RecommendUnseenUser)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace igccf
