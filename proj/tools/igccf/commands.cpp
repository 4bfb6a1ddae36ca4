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

#include "commands.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "artifacts.hpp"
#include "igccf/errors.hpp"
#include "igccf/io.hpp"
#include "igccf/metrics.hpp"
#include "igccf/model.hpp"
#include "igccf/protocols.hpp"
#include "igccf/sweep.hpp"

namespace igccf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

RunLayout layout_of(const RunConfig& config) {
  if (config.run_dir.empty()) throw ConfigError("run.dir: a run directory is required (--run-dir)");
  return RunLayout{config.run_dir};
}

json config_section(const RunConfig& config, const std::string& prefix) {
  json out = json::object();
  for (const auto& [k, v] : describe(config))
    if (k.rfind(prefix, 0) == 0) out[k] = v;
  return out;
}

bool has_protocol(const RunConfig& config, Protocol p) {
  return std::find(config.protocols.begin(), config.protocols.end(), p) != config.protocols.end();
}

void check_universe(const KeyIndex& items, const json& manifest, const std::string& what) {
  const auto expected = manifest.at("item_universe_sha256").get<std::string>();
  if (universe_hash(items) != expected) {
    throw IncompatibleArtifacts(what + " has a different item universe than the run artifacts (item table hash " +
                                universe_hash(items).substr(0, 12) + " vs " + expected.substr(0, 12) + ")");
  }
}

void require_split(const json& manifest, Protocol p) {
  if (!manifest.contains("splits") || !manifest["splits"].contains(to_string(p))) {
    throw IncompatibleArtifacts("no " + to_string(p) + " split was prepared; add it to split.protocols and rerun prepare");
  }
}

void print_progress(const EpochRecord& rec, const MetricSpec& metric) {
  std::cerr << "epoch " << rec.epoch << "  loss " << std::setprecision(6) << rec.loss;
  if (rec.validation) std::cerr << "  val " << metric.name() << " " << metric.read(*rec.validation);
  std::cerr << "  (" << std::setprecision(3) << rec.seconds << " s)\n";
}

}  // namespace

void cmd_prepare(const RunConfig& config, std::ostream& out) {
  const auto layout = layout_of(config);
  if (!config.data_path) throw ConfigError("data.path: no interaction file given (--data)");
  if (!fs::exists(*config.data_path)) {
    throw ConfigError("data.path: interaction file '" + config.data_path->string() + "' does not exist");
  }
  RunLock lock(layout.root);

  const auto records = load_interactions(*config.data_path, config.load);
  const auto raw = build_matrix(records);
  const auto matrix = config.k_core > 1 ? kcore_filter(raw, config.k_core) : raw;

  std::vector<fs::path> files;
  const auto data = layout.data_dir();
  fs::create_directories(data);
  write_keys(data / "users.tsv", matrix.users());
  write_keys(data / "items.tsv", matrix.items());
  write_interactions(data / "interactions.tsv", matrix);
  files.insert(files.end(), {data / "users.tsv", data / "items.tsv", data / "interactions.tsv"});

  json splits = json::object();
  if (has_protocol(config, Protocol::Transductive)) {
    const auto& po = config.protocol_options;
    const auto split = split_per_user(matrix, po.train_frac, po.val_frac, config.split_seed);
    const auto dir = layout.split_dir("transductive");
    write_split(dir, split);
    for (const char* f : {"split.header", "train.tsv", "validation.tsv", "test.tsv", "users.tsv", "items.tsv"})
      files.push_back(dir / f);
    splits["transductive"] = {{"train", split.train.nnz()},
                              {"validation", split.validation.nnz()},
                              {"test", split.test.nnz()}};
  }
  if (has_protocol(config, Protocol::Inductive)) {
    const auto& po = config.protocol_options;
    const auto h = split_user_holdout(matrix, po.unseen_frac, po.profile_build_frac, config.split_seed);
    const auto dir = layout.split_dir("inductive");
    write_holdout(dir, h);
    for (const char* f : {"split.header", "train_users.tsv", "unseen_build.tsv", "unseen_eval.tsv", "users.tsv",
                          "items.tsv"})
      files.push_back(dir / f);
    splits["inductive"] = {{"seen_users", matrix.n_active_users() - h.unseen_users.size()},
                           {"unseen_users", h.unseen_users.size()},
                           {"train_users", h.train_users.nnz()},
                           {"unseen_build", h.unseen_build.nnz()},
                           {"unseen_eval", h.unseen_eval.nnz()}};
  }

  json manifest;
  manifest["format"] = "igccf-run/1";
  manifest["config"] = config_section(config, "data.");
  manifest["config"].update(config_section(config, "split."));
  manifest["source"] = {{"path", config.data_path->string()}, {"sha256", sha256_file(*config.data_path)}};
  manifest["counts"] = {{"records", records.size()},
                        {"raw", {{"users", raw.n_users()}, {"items", raw.n_items()}, {"interactions", raw.nnz()}}},
                        {"kcore", {{"users", matrix.n_users()}, {"items", matrix.n_items()}, {"interactions", matrix.nnz()}}}};
  manifest["splits"] = splits;
  manifest["item_universe_sha256"] = universe_hash(matrix.items());
  manifest["files"] = hash_files(layout, files);
  write_json(layout.manifest(), manifest);

  out << "prepared " << matrix.n_users() << " users, " << matrix.n_items() << " items, " << matrix.nnz()
      << " interactions (raw " << raw.n_users() << "/" << raw.n_items() << "/" << raw.nnz() << ", k-core "
      << config.k_core << ")\n";
  out << "manifest: " << layout.manifest().string() << '\n';
}

void cmd_train(const RunConfig& config, std::optional<Protocol> protocol, std::ostream& out) {
  const auto layout = layout_of(config);
  RunLock lock(layout.root);
  const auto manifest = verify_manifest(layout);
  const auto protocols = protocol ? std::vector<Protocol>{*protocol} : config.protocols;
  const auto& po = config.protocol_options;
  const auto progress = [&](const EpochRecord& rec) { print_progress(rec, config.train.early_stop); };

  for (auto p : protocols) {
    require_split(manifest, p);
    const auto name = to_string(p);
    std::optional<FitResult> result;
    if (p == Protocol::Transductive) {
      const auto split = read_split(layout.split_dir(name));
      check_universe(split.train.items(), manifest, "the transductive split");
      result = po.retrain_merged ? fit_and_retrain(split.train, split.validation, config.train, progress)
                                 : fit(split.train, &split.validation, config.train, progress);
    } else {
      const auto h = read_holdout(layout.split_dir(name));
      check_universe(h.train_users.items(), manifest, "the inductive split");
      result = fit_seen_users(h.train_users, config.train, po, config.train.seed);
      for (const auto& rec : result->history) progress(rec);
    }
    fs::create_directories(layout.model(name).parent_path());
    save_model(layout.model(name), result->model);
    {
      std::ofstream hist(layout.history(name));
      write_history(hist, result->history);
    }
    json info;
    info["protocol"] = name;
    info["best_epoch"] = result->best_epoch;
    info["best_validation"] = result->best_score ? json(*result->best_score) : json(nullptr);
    info["early_stop"] = config.train.early_stop.name();
    info["config"] = config_section(config, "model.");
    info["config"].update(config_section(config, "train."));
    info["item_universe_sha256"] = universe_hash(result->model.items());
    info["manifest_sha256"] = sha256_file(layout.manifest());
    info["model_sha256"] = sha256_file(layout.model(name));
    write_json(layout.model_info(name), info);
    out << name << ": best epoch " << result->best_epoch;
    if (result->best_score) out << ", validation " << config.train.early_stop.name() << " " << *result->best_score;
    out << ", model " << layout.model(name).string() << '\n';
  }
}

void cmd_evaluate(const RunConfig& config, Protocol protocol, const std::optional<fs::path>& model_path,
                  std::ostream& out) {
  const auto layout = layout_of(config);
  RunLock lock(layout.root);
  const auto manifest = verify_manifest(layout);
  require_split(manifest, protocol);
  const auto name = to_string(protocol);
  const auto path = model_path.value_or(layout.model(name));
  if (!fs::exists(path)) throw IncompatibleArtifacts("model file '" + path.string() + "' not found; run 'igccf train'");
  const auto model = load_model(path);
  check_universe(model.items(), manifest, "model '" + path.string() + "'");

  const auto& cutoffs = config.protocol_options.cutoffs;
  MetricsReport report;
  if (protocol == Protocol::Transductive) {
    report = evaluate_transductive(model, read_split(layout.split_dir(name)), cutoffs);
  } else {
    report = evaluate_inductive(model, read_holdout(layout.split_dir(name)), cutoffs);
  }
  print_report_table(out, report);
  fs::create_directories(layout.reports());
  std::ofstream tsv(layout.reports() / (name + ".tsv"));
  write_report_tsv(tsv, report);
}

void cmd_recommend(const RecommendRequest& request, std::ostream& out, std::ostream& err) {
  if (request.n < 1) throw ConfigError("-n: must be >= 1");
  if (!fs::exists(request.model)) throw ConfigError("--model: file '" + request.model.string() + "' does not exist");
  const auto model = load_model(request.model);

  std::vector<std::string> keys = request.items;
  if (request.profile_file) {
    std::ifstream in(*request.profile_file);
    if (!in) throw ConfigError("--profile-file: cannot open '" + request.profile_file->string() + "'");
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty() && line[0] != '#') keys.push_back(line);
    }
  }
  if (keys.empty()) throw ConfigError("recommend: give a profile with --items or --profile-file");

  std::vector<ItemIndex> profile;
  std::vector<std::string> unknown;
  for (const auto& k : keys) {
    if (auto i = model.items().find(k)) {
      profile.push_back(*i);
    } else {
      unknown.push_back(k);
    }
  }
  std::string listed;
  for (const auto& k : unknown) listed += (listed.empty() ? "" : ", ") + ("'" + k + "'");
  if (profile.empty()) throw Error("no profile item is known to the model: " + listed);
  if (!unknown.empty()) err << "warning: skipping unknown items " << listed << '\n';

  out << std::setprecision(9);
  for (const auto& s : model.recommend(profile, request.n, !request.include_profile))
    out << model.items().key(s.item) << '\t' << s.score << '\n';
}

void cmd_sweep(const RunConfig& config, const SweepRequest& request, std::ostream& out) {
  const auto layout = layout_of(config);
  const auto parameter = [&] {
    try {
      return parse_sweep_parameter(request.parameter);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("--parameter: ") + e.what());
    }
  }();
  std::vector<double> grid;
  try {
    grid = parse_grid(request.grid);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("--grid: ") + e.what());
  }
  if (request.seeds.empty()) throw ConfigError("--seeds: at least one seed is required");
  try {
    for (double v : grid) apply_sweep_value(config.train, parameter, v);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("--grid: ") + e.what());
  }

  RunLock lock(layout.root);
  const auto manifest = verify_manifest(layout);
  const auto data_dir = layout.data_dir();
  auto users = std::make_shared<const KeyIndex>(read_keys(data_dir / "users.tsv"));
  auto items = std::make_shared<const KeyIndex>(read_keys(data_dir / "items.tsv"));
  check_universe(*items, manifest, "the prepared data");
  const auto data = read_interactions(data_dir / "interactions.tsv", users, items);

  const auto result = run_sweep(parameter, grid, config.train, data, request.seeds, config.protocol_options);
  fs::create_directories(layout.reports());
  const auto stem = layout.reports() / ("sweep_" + to_string(parameter));
  {
    std::ofstream lf(stem.string() + "_long.tsv");
    write_sweep_long(lf, result);
    std::ofstream sf(stem.string() + "_summary.tsv");
    write_sweep_summary(sf, result);
  }
  write_sweep_summary(out, result);
}

}  // namespace igccf::cli
