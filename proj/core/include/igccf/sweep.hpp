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

// One-parameter sweeps: convolution depth, dropout, top-K, and the seen-user
// fraction robustness experiment.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "igccf/data.hpp"
#include "igccf/metrics.hpp"
#include "igccf/protocols.hpp"
#include "igccf/training.hpp"

namespace igccf {

enum class SweepParameter { Depth, Dropout, TopK, TrainUserFraction };

std::string to_string(SweepParameter parameter);
SweepParameter parse_sweep_parameter(const std::string& name);

// Grid token parser: numbers, plus "full"/"none" for an unpruned top_k (0).
std::vector<double> parse_grid(const std::string& text);

// top_k value 0 means no pruning.
TrainConfig apply_sweep_value(const TrainConfig& base, SweepParameter parameter, double value);

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  std::uint64_t seed = 0;
  std::string metric;  // "ndcg@20", or "seen/ndcg@20" / "unseen/ndcg@20"
  double score = 0.0;
  double train_seconds = 0.0;
};

struct SweepPoint {
  double value = 0.0;
  // Seed-averaged. For TrainUserFraction `report` covers seen users and
  // `unseen` the held-out users.
  MetricsReport report;
  std::optional<MetricsReport> unseen;
  double train_seconds = 0.0;  // mean over seeds
};

struct SweepResult {
  SweepParameter parameter = SweepParameter::Depth;
  std::vector<double> grid;
  std::vector<SweepPoint> points;
  std::vector<SweepRow> rows;
};

// Throws InvalidArgument on an empty grid or seed list.
SweepResult run_sweep(SweepParameter parameter, std::span<const double> grid, const TrainConfig& base,
                      const InteractionMatrix& data, std::span<const std::uint64_t> seeds,
                      const ProtocolOptions& options);

// Long format: parameter, value, seed, metric, score, train_seconds.
void write_sweep_long(std::ostream& out, const SweepResult& result);
// One row per grid value with seed-averaged metrics.
void write_sweep_summary(std::ostream& out, const SweepResult& result);

}  // namespace igccf
