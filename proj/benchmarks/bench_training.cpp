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

#include "bench_data.hpp"
#include "igccf/training.hpp"

namespace igccf {
namespace {

TrainConfig bench_config(std::size_t depth) {
  TrainConfig config;
  config.model.dim = 64;
  config.model.depth = depth;
  config.model.top_k = 20;
  config.batch_size = 1024;
  return config;
}

void BM_BatchGradient(benchmark::State& state) {
  const auto m = bench::block_matrix(2000, 3000, 40);
  const auto config = bench_config(static_cast<std::size_t>(state.range(0)));
  const auto p = build_item_propagation(m, config.model);
  const auto x0 = init_embeddings(m.n_items(), config.model.dim, 1);
  Rng rng(3);
  const auto triples = sample_triples(m, config.batch_size, rng);
  const auto batch = gather_profiles(triples, m, config.model.weighting);
  const auto masked = apply_user_profile_dropout(batch.profiles, config.model.dropout, rng);
  for (auto _ : state) {
    auto g = bpr_loss_and_gradient(*p, config.model.depth, x0, triples, batch.slot, masked, config.model.l2,
                                   config.l2_scope);
    benchmark::DoNotOptimize(g.gradient.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(triples.size()));
}
BENCHMARK(BM_BatchGradient)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_SampleTriples(benchmark::State& state) {
  const auto m = bench::block_matrix(2000, 3000, 40);
  const TripleSampler sampler(m);
  Rng rng(5);
  for (auto _ : state) {
    auto t = sampler.sample(1024, rng);
    benchmark::DoNotOptimize(t.data());
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_SampleTriples);

void BM_TrainEpoch(benchmark::State& state) {
  const auto m = bench::block_matrix(1000, 1500, 30);
  const auto config = bench_config(1);
  Trainer trainer(m, config);
  for (auto _ : state) benchmark::DoNotOptimize(trainer.train_epoch());
  state.counters["batches"] = static_cast<double>(trainer.batches_per_epoch());
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace igccf
