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

#include "igccf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "igccf/errors.hpp"

namespace igccf {

std::string to_string(Protocol protocol) {
  return protocol == Protocol::Transductive ? "transductive" : "inductive";
}

Protocol parse_protocol(const std::string& name) {
  if (name == "transductive") return Protocol::Transductive;
  if (name == "inductive") return Protocol::Inductive;
  throw InvalidArgument("unknown protocol '" + name + "' (expected transductive or inductive)");
}

namespace {

void check_metric_args(std::span<const ItemIndex> relevant, std::size_t n) {
  if (n < 1) throw InvalidArgument("metric cutoff N must be >= 1");
  if (relevant.empty()) throw InvalidArgument("metric needs a non-empty relevant set");
}

bool is_relevant(std::span<const ItemIndex> relevant, ItemIndex item) {
  return std::binary_search(relevant.begin(), relevant.end(), item);
}

}  // namespace

double recall_at_n(std::span<const ItemIndex> ranked, std::span<const ItemIndex> relevant, std::size_t n) {
  check_metric_args(relevant, n);
  const auto depth = std::min(n, ranked.size());
  std::size_t hits = 0;
  for (std::size_t r = 0; r < depth; ++r)
    if (is_relevant(relevant, ranked[r])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double ndcg_at_n(std::span<const ItemIndex> ranked, std::span<const ItemIndex> relevant, std::size_t n) {
  check_metric_args(relevant, n);
  const auto depth = std::min(n, ranked.size());
  double dcg = 0.0;
  for (std::size_t r = 0; r < depth; ++r)
    if (is_relevant(relevant, ranked[r])) dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  double idcg = 0.0;
  const auto ideal = std::min(n, relevant.size());
  for (std::size_t r = 0; r < ideal; ++r) idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  return dcg / idcg;
}

double MetricSpec::read(const MetricsReport& report) const {
  return kind == MetricKind::Ndcg ? report.ndcg(cutoff) : report.recall(cutoff);
}

std::string MetricSpec::name() const {
  return std::string(kind == MetricKind::Ndcg ? "ndcg" : "recall") + "@" + std::to_string(cutoff);
}

MetricSpec parse_metric(const std::string& text) {
  const auto at = text.find('@');
  if (at == std::string::npos) throw InvalidArgument("metric '" + text + "' must look like ndcg@20 or recall@20");
  MetricSpec spec;
  const auto kind = text.substr(0, at);
  if (kind == "ndcg") {
    spec.kind = MetricKind::Ndcg;
  } else if (kind == "recall") {
    spec.kind = MetricKind::Recall;
  } else {
    throw InvalidArgument("unknown metric '" + kind + "'");
  }
  try {
    std::size_t used = 0;
    const auto cutoff = std::stoul(text.substr(at + 1), &used);
    if (used != text.size() - at - 1 || cutoff < 1) throw InvalidArgument("");
    spec.cutoff = cutoff;
  } catch (const std::exception&) {
    throw InvalidArgument("metric '" + text + "' has an invalid cutoff");
  }
  return spec;
}

MetricsReport evaluate_users(const TrainedModel& model, const InteractionMatrix& profiles,
                             const InteractionMatrix& targets, std::span<const std::size_t> cutoffs,
                             Protocol protocol) {
  if (cutoffs.empty()) throw InvalidArgument("evaluate: no cutoffs given");
  if (profiles.n_users() != targets.n_users() || profiles.n_items() != targets.n_items()) {
    throw DimensionMismatch("evaluate: profile and target matrices differ in shape");
  }
  if (profiles.n_items() != model.n_items()) {
    throw DimensionMismatch("evaluate: model has " + std::to_string(model.n_items()) + " items, data has " +
                            std::to_string(profiles.n_items()));
  }
  const auto max_cutoff = *std::max_element(cutoffs.begin(), cutoffs.end());

  MetricsReport report;
  report.protocol = protocol;
  std::map<std::size_t, CutoffMetrics> sums;
  for (auto n : cutoffs) {
    if (n < 1) throw InvalidArgument("evaluate: cutoffs must be >= 1");
    sums[n] = {};
  }

  std::vector<ItemIndex> ranked;
  for (UserIndex u = 0; u < targets.n_users(); ++u) {
    const auto relevant = targets.row(u);
    if (relevant.empty()) continue;
    const auto profile = profiles.row(u);
    if (profile.empty()) {
      ++report.n_users_skipped;
      continue;
    }
    const auto scores = model.score_all(profile);
    const auto top = top_n(scores, max_cutoff, profile);
    ranked.clear();
    for (const auto& s : top) ranked.push_back(s.item);
    for (auto& [n, acc] : sums) {
      acc.recall += recall_at_n(ranked, relevant, n);
      acc.ndcg += ndcg_at_n(ranked, relevant, n);
    }
    ++report.n_users_evaluated;
  }
  for (auto& [n, acc] : sums) {
    CutoffMetrics mean;
    if (report.n_users_evaluated > 0) {
      mean.recall = acc.recall / static_cast<double>(report.n_users_evaluated);
      mean.ndcg = acc.ndcg / static_cast<double>(report.n_users_evaluated);
    }
    report.by_cutoff[n] = mean;
  }
  return report;
}

void write_report_tsv(std::ostream& out, const MetricsReport& report) {
  out << "protocol\tcutoff\trecall\tndcg\tn_users\n";
  out << std::setprecision(6) << std::fixed;
  for (const auto& [n, m] : report.by_cutoff) {
    out << to_string(report.protocol) << '\t' << n << '\t' << m.recall << '\t' << m.ndcg << '\t'
        << report.n_users_evaluated << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

void print_report_table(std::ostream& out, const MetricsReport& report) {
  out << to_string(report.protocol) << " evaluation, " << report.n_users_evaluated << " users";
  if (report.n_users_skipped > 0) out << " (" << report.n_users_skipped << " skipped: empty profile)";
  out << '\n';
  out << std::left << std::setw(8) << "N" << std::setw(12) << "Recall@N" << std::setw(12) << "NDCG@N" << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& [n, m] : report.by_cutoff) {
    out << std::left << std::setw(8) << n << std::setw(12) << m.recall << std::setw(12) << m.ndcg << '\n';
  }
  out.unsetf(std::ios::floatfield);
  out << std::right;
}

}  // namespace igccf
