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

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "artifacts.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "igccf/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace igccf;
  using namespace igccf::cli;

  CLI::App app{"igccf: item-graph collaborative filtering with inductive user embeddings"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  app.add_option("-c,--config", config_path, "sectioned key-value config file");
  std::map<std::string, std::optional<std::string>> flag_values;
  for (const auto& key : config_keys()) {
    auto& slot = flag_values[key.key];
    app.add_option(std::string("--") + key.flag, slot, std::string(key.help) + " [" + key.key + "]");
  }
  std::vector<std::string> assignments;
  app.add_option("--set", assignments, "override any config key: section.name=value");

  auto* prepare = app.add_subcommand("prepare", "load, k-core filter and split a raw interaction file");

  auto* train = app.add_subcommand("train", "fit models on the prepared splits");
  std::optional<std::string> train_protocol;
  train->add_option("--protocol", train_protocol, "transductive or inductive (default: split.protocols)");

  auto* evaluate = app.add_subcommand("evaluate", "score a model on its held-out split");
  std::string eval_protocol = "transductive";
  std::optional<std::string> eval_model;
  evaluate->add_option("--protocol", eval_protocol, "transductive or inductive");
  evaluate->add_option("--model", eval_model, "model file (default: the run's model for the protocol)");

  auto* recommend = app.add_subcommand("recommend", "rank items for a profile of item keys");
  RecommendRequest rec;
  std::string rec_items;
  recommend->add_option("--model", rec.model, "model file")->required();
  recommend->add_option("--items", rec_items, "comma-separated item keys");
  recommend->add_option("--profile-file", rec.profile_file, "file with one item key per line");
  recommend->add_option("-n", rec.n, "number of items to return");
  recommend->add_flag("--include-profile", rec.include_profile, "allow profile items in the output");

  auto* sweep = app.add_subcommand("sweep", "one-parameter sweep on the prepared data");
  SweepRequest sw;
  std::string seeds = "1";
  sweep->add_option("--parameter", sw.parameter, "depth, dropout, top_k or train_user_fraction")->required();
  sweep->add_option("--grid", sw.grid, "comma-separated values; full/none for unpruned top_k")->required();
  sweep->add_option("--seeds", seeds, "comma-separated seeds averaged per grid point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    std::map<std::string, std::string> overrides;
    for (const auto& [key, value] : flag_values)
      if (value) overrides[key] = *value;
    for (const auto& a : assignments) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) throw ConfigError("--set: expected section.name=value, got '" + a + "'");
      overrides[a.substr(0, eq)] = a.substr(eq + 1);
    }

    if (recommend->parsed()) {
      std::string item;
      std::istringstream in(rec_items);
      while (std::getline(in, item, ','))
        if (!item.empty()) rec.items.push_back(item);
      cmd_recommend(rec, std::cout, std::cerr);
      return kExitOk;
    }

    const auto config = load_run_config(config_path ? std::optional<std::filesystem::path>(*config_path) : std::nullopt,
                                        overrides);
    const auto protocol_arg = [](const std::string& name) {
      try {
        return parse_protocol(name);
      } catch (const InvalidArgument&) {
        throw ConfigError("--protocol: expected transductive or inductive, got '" + name + "'");
      }
    };
    if (prepare->parsed()) {
      cmd_prepare(config, std::cout);
    } else if (train->parsed()) {
      cmd_train(config, train_protocol ? std::optional<Protocol>(protocol_arg(*train_protocol)) : std::nullopt,
                std::cout);
    } else if (evaluate->parsed()) {
      cmd_evaluate(config, protocol_arg(eval_protocol),
                   eval_model ? std::optional<std::filesystem::path>(*eval_model) : std::nullopt, std::cout);
    } else if (sweep->parsed()) {
      std::istringstream in(seeds);
      std::string token;
      while (std::getline(in, token, ',')) {
        if (token.empty()) continue;
        try {
          std::size_t used = 0;
          sw.seeds.push_back(std::stoull(token, &used));
          if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
          throw ConfigError("--seeds: '" + token + "' is not a non-negative integer");
        }
      }
      cmd_sweep(config, sw, std::cout);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "igccf: configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "igccf: error: " << e.what() << '\n';
    return kExitFailure;
  }
}
