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
#include "igccf/graph.hpp"

namespace igccf {
namespace {

void BM_ProjectCosine(benchmark::State& state) {
  const auto m = bench::block_matrix(static_cast<std::size_t>(state.range(0)), 2000, 40);
  for (auto _ : state) {
    auto g = project_cosine(m);
    benchmark::DoNotOptimize(g);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.nnz()));
}
BENCHMARK(BM_ProjectCosine)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ProjectCosineTopK(benchmark::State& state) {
  const auto m = bench::block_matrix(2000, 2000, 40);
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto g = project_cosine_topk(m, k);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_ProjectCosineTopK)->Arg(5)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_TopkPrune(benchmark::State& state) {
  const auto g = project_cosine(bench::block_matrix(2000, 2000, 40));
  for (auto _ : state) {
    auto pruned = topk_prune(g, 20);
    benchmark::DoNotOptimize(pruned);
  }
}
BENCHMARK(BM_TopkPrune)->Unit(benchmark::kMillisecond);

void BM_Propagate(benchmark::State& state) {
  const auto k = state.range(0) == 0 ? std::optional<std::size_t>{} : std::optional<std::size_t>{20};
  const auto m = bench::block_matrix(2000, 3000, 40);
  const auto p = build_propagation(k ? project_cosine_topk(m, *k) : project_cosine(m));
  const DenseMatrix x0 = DenseMatrix::Random(3000, 64);
  const auto depth = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    auto x = propagate(p, x0, depth);
    benchmark::DoNotOptimize(x.data());
  }
  state.counters["nnz"] = static_cast<double>(p.nnz());
}
BENCHMARK(BM_Propagate)
    ->ArgNames({"topk", "depth"})
    ->Args({20, 1})
    ->Args({20, 3})
    ->Args({0, 1})
    ->Args({0, 3})
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace igccf
