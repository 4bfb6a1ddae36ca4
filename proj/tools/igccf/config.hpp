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

// Run configuration: a sectioned key-value file, then per-key overrides.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "igccf/data.hpp"
#include "igccf/protocols.hpp"
#include "igccf/training.hpp"

namespace igccf::cli {

// Usage or configuration problem; exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigKey {
  const char* key;   // "section.name"
  const char* flag;  // long flag without dashes
  const char* help;
};

// Every recognised key with its command-line flag.
const std::vector<ConfigKey>& config_keys();

struct RunConfig {
  std::filesystem::path run_dir;

  std::optional<std::filesystem::path> data_path;
  LoadOptions load;
  std::size_t k_core = 10;

  std::uint64_t split_seed = 42;
  std::vector<Protocol> protocols{Protocol::Transductive, Protocol::Inductive};
  ProtocolOptions protocol_options;

  TrainConfig train;
};

// Reads `path` (when set), applies `overrides` keyed by "section.name", and
// validates. Throws ConfigError with the offending key in the message.
RunConfig load_run_config(const std::optional<std::filesystem::path>& path,
                          const std::map<std::string, std::string>& overrides);

// Flat "section.name = value" listing of the effective configuration.
std::map<std::string, std::string> describe(const RunConfig& config);

std::vector<std::size_t> parse_cutoffs(const std::string& text);

}  // namespace igccf::cli
