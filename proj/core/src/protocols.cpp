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

#include "igccf/protocols.hpp"

#include <algorithm>

#include "igccf/errors.hpp"

namespace igccf {

namespace {

// Sub-streams of one protocol seed, so that splits and training draw
// independently.
constexpr std::uint64_t kCarveSalt = 0x6361727665ULL;
constexpr std::uint64_t kSeenSalt = 0x7365656eULL;

FitResult fit_split(const DatasetSplit& split, const TrainConfig& config, bool retrain_merged) {
  if (retrain_merged) return fit_and_retrain(split.train, split.validation, config);
  return fit(split.train, &split.validation, config);
}

}  // namespace

MetricsReport evaluate_transductive(const TrainedModel& model, const DatasetSplit& split,
                                    std::span<const std::size_t> cutoffs) {
  const auto profiles = merge(split.train, split.validation);
  return evaluate_users(model, profiles, split.test, cutoffs, Protocol::Transductive);
}

MetricsReport evaluate_inductive(const TrainedModel& model, const UserHoldoutSplit& split,
                                 std::span<const std::size_t> cutoffs) {
  return evaluate_users(model, split.unseen_build, split.unseen_eval, cutoffs, Protocol::Inductive);
}

TransductiveRun run_transductive(const InteractionMatrix& data, const TrainConfig& config,
                                 const ProtocolOptions& options, std::uint64_t seed) {
  const auto split = split_per_user(data, options.train_frac, options.val_frac, seed);
  TrainConfig run_config = config;
  run_config.seed = seed;
  auto result = fit_split(split, run_config, options.retrain_merged);
  auto report = evaluate_transductive(result.model, split, options.cutoffs);
  return TransductiveRun{std::move(result), std::move(report)};
}

FitResult fit_seen_users(const InteractionMatrix& train_users, const TrainConfig& config,
                         const ProtocolOptions& options, std::uint64_t seed) {
  // The carve-out's test part goes back into training; only validation is held.
  const auto carve = split_per_user(train_users, options.train_frac, options.val_frac, seed ^ kCarveSalt);
  const auto carve_train = merge(carve.train, carve.test);
  TrainConfig run_config = config;
  run_config.seed = seed;
  auto tuned = fit(carve_train, &carve.validation, run_config);
  if (!options.retrain_merged) return tuned;
  run_config.epochs = std::max<std::size_t>(1, tuned.best_epoch);
  auto final_fit = fit(train_users, nullptr, run_config);
  return FitResult{std::move(final_fit.model), std::move(tuned.history), tuned.best_epoch, tuned.best_score,
                   tuned.train_seconds + final_fit.train_seconds};
}

InductiveRun run_inductive(const InteractionMatrix& data, const TrainConfig& config, const ProtocolOptions& options,
                           std::uint64_t seed, bool report_seen) {
  const auto holdout = split_user_holdout(data, options.unseen_frac, options.profile_build_frac, seed);
  if (!report_seen) {
    auto result = fit_seen_users(holdout.train_users, config, options, seed);
    auto unseen = evaluate_inductive(result.model, holdout, options.cutoffs);
    return InductiveRun{std::move(result), std::move(unseen), std::nullopt};
  }
  // Seen users keep a per-user test part out of training.
  const auto seen_split = split_per_user(holdout.train_users, options.train_frac, options.val_frac, seed ^ kSeenSalt);
  TrainConfig run_config = config;
  run_config.seed = seed;
  auto result = fit_split(seen_split, run_config, options.retrain_merged);
  auto seen = evaluate_transductive(result.model, seen_split, options.cutoffs);
  auto unseen = evaluate_inductive(result.model, holdout, options.cutoffs);
  return InductiveRun{std::move(result), std::move(unseen), std::move(seen)};
}

}  // namespace igccf
