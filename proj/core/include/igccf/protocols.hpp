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

// Transductive (per-user 80/10/10) and inductive (user holdout) protocols.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "igccf/data.hpp"
#include "igccf/metrics.hpp"
#include "igccf/model.hpp"
#include "igccf/training.hpp"

namespace igccf {

// Ranks for every test user all items outside train ∪ validation, using that
// union as the profile.
MetricsReport evaluate_transductive(const TrainedModel& model, const DatasetSplit& split,
                                    std::span<const std::size_t> cutoffs);

// Embeds every unseen user from unseen_build, ranks items outside it and
// scores against unseen_eval.
MetricsReport evaluate_inductive(const TrainedModel& model, const UserHoldoutSplit& split,
                                 std::span<const std::size_t> cutoffs);

struct ProtocolOptions {
  double train_frac = 0.8;
  double val_frac = 0.1;
  double unseen_frac = 0.1;
  double profile_build_frac = 0.9;
  std::vector<std::size_t> cutoffs{5, 20};
  // Retrain on train ∪ validation for the best epoch count before testing.
  bool retrain_merged = true;
};

struct TransductiveRun {
  FitResult fit;
  MetricsReport test;
};

// Splits `data` with `seed`, trains (config.seed is replaced by `seed`) and
// reports on the test part.
TransductiveRun run_transductive(const InteractionMatrix& data, const TrainConfig& config,
                                 const ProtocolOptions& options, std::uint64_t seed);

// Trains on seen users only. Early stopping uses a per-user validation carve
// out of the seen profiles; the final model is retrained on all of them.
FitResult fit_seen_users(const InteractionMatrix& train_users, const TrainConfig& config,
                         const ProtocolOptions& options, std::uint64_t seed);

struct InductiveRun {
  FitResult fit;
  MetricsReport unseen;
  // Seen-user report on a per-user test part held out of their profiles.
  std::optional<MetricsReport> seen;
};

InductiveRun run_inductive(const InteractionMatrix& data, const TrainConfig& config, const ProtocolOptions& options,
                           std::uint64_t seed, bool report_seen = false);

}  // namespace igccf
