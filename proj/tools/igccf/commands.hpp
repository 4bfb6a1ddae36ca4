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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace igccf::cli {

void cmd_prepare(const RunConfig& config, std::ostream& out);

// `protocol` unset: every protocol listed in split.protocols.
void cmd_train(const RunConfig& config, std::optional<Protocol> protocol, std::ostream& out);

void cmd_evaluate(const RunConfig& config, Protocol protocol, const std::optional<std::filesystem::path>& model,
                  std::ostream& out);

struct RecommendRequest {
  std::filesystem::path model;
  std::vector<std::string> items;
  std::optional<std::filesystem::path> profile_file;
  std::size_t n = 10;
  bool include_profile = false;
};
void cmd_recommend(const RecommendRequest& request, std::ostream& out, std::ostream& err);

struct SweepRequest {
  std::string parameter;
  std::string grid;
  std::vector<std::uint64_t> seeds;
};
void cmd_sweep(const RunConfig& config, const SweepRequest& request, std::ostream& out);

}  // namespace igccf::cli
