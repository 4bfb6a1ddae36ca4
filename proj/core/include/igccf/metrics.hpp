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

// Ranking metrics (binary relevance) and all-item ranking evaluation.

#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "igccf/data.hpp"
#include "igccf/model.hpp"

namespace igccf {

enum class Protocol { Transductive, Inductive };

std::string to_string(Protocol protocol);
Protocol parse_protocol(const std::string& name);

// |top-n ∩ relevant| / |relevant|. `relevant` must be sorted ascending and
// non-empty.
double recall_at_n(std::span<const ItemIndex> ranked, std::span<const ItemIndex> relevant, std::size_t n);

// DCG over the first n positions with discount 1/log2(rank + 1), normalised by
// the ideal DCG of min(n, |relevant|) hits. Same preconditions as recall_at_n.
double ndcg_at_n(std::span<const ItemIndex> ranked, std::span<const ItemIndex> relevant, std::size_t n);

struct CutoffMetrics {
  double recall = 0.0;
  double ndcg = 0.0;
};

struct MetricsReport {
  Protocol protocol = Protocol::Transductive;
  std::size_t n_users_evaluated = 0;
  // Users with a target but an empty profile (inductive only).
  std::size_t n_users_skipped = 0;
  std::map<std::size_t, CutoffMetrics> by_cutoff;

  double recall(std::size_t n) const { return by_cutoff.at(n).recall; }
  double ndcg(std::size_t n) const { return by_cutoff.at(n).ndcg; }
};

enum class MetricKind { Recall, Ndcg };

struct MetricSpec {
  MetricKind kind = MetricKind::Ndcg;
  std::size_t cutoff = 20;

  double read(const MetricsReport& report) const;
  std::string name() const;
};

// "ndcg@20", "recall@5", ...
MetricSpec parse_metric(const std::string& text);

// For every user with a non-empty target row: embed from `profiles`, rank all
// items except the profile items, score against `targets`. Users with an empty
// profile are counted in n_users_skipped. Both matrices must share a universe
// with each other and the model's item table size.
MetricsReport evaluate_users(const TrainedModel& model, const InteractionMatrix& profiles,
                             const InteractionMatrix& targets, std::span<const std::size_t> cutoffs,
                             Protocol protocol);

// Tab-separated: protocol, cutoff, recall, ndcg, n_users.
void write_report_tsv(std::ostream& out, const MetricsReport& report);
void print_report_table(std::ostream& out, const MetricsReport& report);

}  // namespace igccf
