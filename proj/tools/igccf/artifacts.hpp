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

// Run-directory plumbing: content hashes, the manifest, and the lock file.

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "igccf/data.hpp"

namespace igccf::cli {

// Artifacts that do not belong together; exit code 1.
class IncompatibleArtifacts : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);
// Hash of the key table as written to items.tsv (one key per line).
std::string universe_hash(const KeyIndex& keys);

// Layout below the run directory.
struct RunLayout {
  std::filesystem::path root;

  std::filesystem::path manifest() const { return root / "manifest.json"; }
  std::filesystem::path data_dir() const { return root / "data"; }
  std::filesystem::path split_dir(const std::string& protocol) const { return root / "splits" / protocol; }
  std::filesystem::path model(const std::string& protocol) const { return root / "models" / (protocol + ".bin"); }
  std::filesystem::path model_info(const std::string& protocol) const {
    return root / "models" / (protocol + ".json");
  }
  std::filesystem::path history(const std::string& protocol) const {
    return root / "models" / (protocol + "_history.tsv");
  }
  std::filesystem::path reports() const { return root / "reports"; }
};

// Pretty-printed with sorted keys and a trailing newline, so equal content
// gives equal bytes.
void write_json(const std::filesystem::path& path, const nlohmann::json& value);
nlohmann::json read_json(const std::filesystem::path& path);

// Reads the manifest and checks every listed file against its hash. Throws
// IncompatibleArtifacts on a missing or modified file.
nlohmann::json verify_manifest(const RunLayout& layout);

// Sorted-key JSON encoding of `files` relative to the run directory.
nlohmann::json hash_files(const RunLayout& layout, const std::vector<std::filesystem::path>& files);

// Exclusive lock on a run directory, released on destruction.
class RunLock {
 public:
  explicit RunLock(const std::filesystem::path& run_dir);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  std::filesystem::path path_;
};

}  // namespace igccf::cli
