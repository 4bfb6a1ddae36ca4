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

#include "igccf/sweep.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "igccf/errors.hpp"

namespace igccf {

std::string to_string(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::Depth:
      return "depth";
    case SweepParameter::Dropout:
      return "dropout";
    case SweepParameter::TopK:
      return "top_k";
    case SweepParameter::TrainUserFraction:
      return "train_user_fraction";
  }
  return "unknown";
}

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "depth") return SweepParameter::Depth;
  if (name == "dropout" || name == "dropout_p") return SweepParameter::Dropout;
  if (name == "top_k" || name == "topk") return SweepParameter::TopK;
  if (name == "train_user_fraction" || name == "fraction") return SweepParameter::TrainUserFraction;
  throw InvalidArgument("unknown sweep parameter '" + name +
                        "' (expected depth, dropout, top_k or train_user_fraction)");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    const auto first = token.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    token = token.substr(first, token.find_last_not_of(" \t") - first + 1);
    if (token == "full" || token == "none") {
      grid.push_back(0.0);
      continue;
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || !std::isfinite(value)) throw InvalidArgument("grid: cannot parse '" + token + "'");
    grid.push_back(value);
  }
  if (grid.empty()) throw InvalidArgument("grid: no values given");
  return grid;
}

namespace {

std::size_t as_count(double value, const std::string& name) {
  if (value < 0.0 || std::floor(value) != value) {
    throw InvalidArgument(name + ": grid value must be a non-negative integer, got " + std::to_string(value));
  }
  return static_cast<std::size_t>(value);
}

void accumulate(MetricsReport& sum, const MetricsReport& report) {
  sum.protocol = report.protocol;
  sum.n_users_evaluated = report.n_users_evaluated;
  sum.n_users_skipped = report.n_users_skipped;
  for (const auto& [n, m] : report.by_cutoff) {
    sum.by_cutoff[n].recall += m.recall;
    sum.by_cutoff[n].ndcg += m.ndcg;
  }
}

void divide(MetricsReport& sum, std::size_t count) {
  for (auto& [n, m] : sum.by_cutoff) {
    m.recall /= static_cast<double>(count);
    m.ndcg /= static_cast<double>(count);
  }
}

void add_rows(std::vector<SweepRow>& rows, const std::string& parameter, double value, std::uint64_t seed,
              const std::string& prefix, const MetricsReport& report, double seconds) {
  for (const auto& [n, m] : report.by_cutoff) {
    rows.push_back({parameter, value, seed, prefix + "recall@" + std::to_string(n), m.recall, seconds});
    rows.push_back({parameter, value, seed, prefix + "ndcg@" + std::to_string(n), m.ndcg, seconds});
  }
}

}  // namespace

TrainConfig apply_sweep_value(const TrainConfig& base, SweepParameter parameter, double value) {
  TrainConfig config = base;
  switch (parameter) {
    case SweepParameter::Depth:
      config.model.depth = as_count(value, "depth");
      break;
    case SweepParameter::Dropout:
      config.model.dropout = value;
      break;
    case SweepParameter::TopK: {
      const auto k = as_count(value, "top_k");
      config.model.top_k = k == 0 ? std::nullopt : std::optional<std::size_t>(k);
      break;
    }
    case SweepParameter::TrainUserFraction:
      if (!(value > 0.0 && value < 1.0)) {
        throw InvalidArgument("train_user_fraction: grid value must be in (0, 1), got " + std::to_string(value));
      }
      break;
  }
  config.validate();
  return config;
}

SweepResult run_sweep(SweepParameter parameter, std::span<const double> grid, const TrainConfig& base,
                      const InteractionMatrix& data, std::span<const std::uint64_t> seeds,
                      const ProtocolOptions& options) {
  if (grid.empty()) throw InvalidArgument("run_sweep: empty grid");
  if (seeds.empty()) throw InvalidArgument("run_sweep: empty seed list");
  // Validate every point before training any of them.
  std::vector<TrainConfig> configs;
  for (double value : grid) configs.push_back(apply_sweep_value(base, parameter, value));

  SweepResult result;
  result.parameter = parameter;
  result.grid.assign(grid.begin(), grid.end());
  const auto name = to_string(parameter);

  for (std::size_t g = 0; g < grid.size(); ++g) {
    SweepPoint point;
    point.value = grid[g];
    MetricsReport unseen_sum;
    for (auto seed : seeds) {
      if (parameter == SweepParameter::TrainUserFraction) {
        ProtocolOptions fraction_options = options;
        fraction_options.unseen_frac = 1.0 - grid[g];
        const auto run = run_inductive(data, configs[g], fraction_options, seed, /*report_seen=*/true);
        accumulate(point.report, *run.seen);
        accumulate(unseen_sum, run.unseen);
        point.train_seconds += run.fit.train_seconds;
        add_rows(result.rows, name, grid[g], seed, "seen/", *run.seen, run.fit.train_seconds);
        add_rows(result.rows, name, grid[g], seed, "unseen/", run.unseen, run.fit.train_seconds);
      } else {
        const auto run = run_transductive(data, configs[g], options, seed);
        accumulate(point.report, run.test);
        point.train_seconds += run.fit.train_seconds;
        add_rows(result.rows, name, grid[g], seed, "", run.test, run.fit.train_seconds);
      }
    }
    divide(point.report, seeds.size());
    point.train_seconds /= static_cast<double>(seeds.size());
    if (parameter == SweepParameter::TrainUserFraction) {
      divide(unseen_sum, seeds.size());
      point.unseen = std::move(unseen_sum);
    }
    result.points.push_back(std::move(point));
  }
  return result;
}

void write_sweep_long(std::ostream& out, const SweepResult& result) {
  out << "parameter\tvalue\tseed\tmetric\tscore\ttrain_seconds\n";
  for (const auto& row : result.rows) {
    out << row.parameter << '\t' << row.value << '\t' << row.seed << '\t' << row.metric << '\t'
        << std::setprecision(6) << row.score << '\t' << std::setprecision(4) << row.train_seconds << '\n';
  }
}

void write_sweep_summary(std::ostream& out, const SweepResult& result) {
  const bool fraction = result.parameter == SweepParameter::TrainUserFraction;
  std::vector<std::size_t> cutoffs;
  if (!result.points.empty())
    for (const auto& [n, m] : result.points.front().report.by_cutoff) cutoffs.push_back(n);

  out << to_string(result.parameter);
  const std::string lead = fraction ? "seen_" : "";
  for (auto n : cutoffs) out << '\t' << lead << "recall@" << n << '\t' << lead << "ndcg@" << n;
  if (fraction)
    for (auto n : cutoffs) out << "\tunseen_recall@" << n << "\tunseen_ndcg@" << n;
  out << "\ttrain_seconds\n";
  for (const auto& point : result.points) {
    out << point.value << std::setprecision(6);
    for (auto n : cutoffs) out << '\t' << point.report.recall(n) << '\t' << point.report.ndcg(n);
    if (fraction && point.unseen)
      for (auto n : cutoffs) out << '\t' << point.unseen->recall(n) << '\t' << point.unseen->ndcg(n);
    out << '\t' << std::setprecision(4) << point.train_seconds << '\n';
  }
}

}  // namespace igccf
