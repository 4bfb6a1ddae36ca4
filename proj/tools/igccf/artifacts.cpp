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

#include "artifacts.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "igccf/errors.hpp"

namespace igccf::cli {

namespace fs = std::filesystem;

namespace {

class Digest {
 public:
  Digest() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 init failed");
  }
  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw Error("SHA-256 update failed");
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> out{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), out.data(), &len) != 1) throw Error("SHA-256 final failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
      s.push_back(kHex[out[i] >> 4]);
      s.push_back(kHex[out[i] & 15]);
    }
    return s;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Digest d;
  d.update(bytes.data(), bytes.size());
  return d.hex();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  Digest d;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    d.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return d.hex();
}

std::string universe_hash(const KeyIndex& keys) {
  Digest d;
  for (const auto& k : keys.keys()) {
    d.update(k.data(), k.size());
    d.update("\n", 1);
  }
  return d.hex();
}

void write_json(const fs::path& path, const nlohmann::json& value) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << value.dump(2) << '\n';
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IncompatibleArtifacts("'" + path.string() + "' not found; run 'igccf prepare' first");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IncompatibleArtifacts("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

nlohmann::json hash_files(const RunLayout& layout, const std::vector<fs::path>& files) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& f : files) out[fs::relative(f, layout.root).generic_string()] = sha256_file(f);
  return out;
}

nlohmann::json verify_manifest(const RunLayout& layout) {
  auto manifest = read_json(layout.manifest());
  if (!manifest.contains("files")) throw IncompatibleArtifacts("manifest lists no files");
  for (const auto& [rel, hash] : manifest["files"].items()) {
    const auto path = layout.root / rel;
    if (!fs::exists(path)) throw IncompatibleArtifacts("artifact '" + path.string() + "' is missing");
    if (sha256_file(path) != hash.get<std::string>()) {
      throw IncompatibleArtifacts("artifact '" + path.string() +
                                  "' does not match the manifest (mixed preprocessing runs?)");
    }
  }
  return manifest;
}

RunLock::RunLock(const fs::path& run_dir) : path_(run_dir / ".igccf.lock") {
  fs::create_directories(run_dir);
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST) {
      throw Error("run directory '" + run_dir.string() + "' is locked by another igccf process (remove '" +
                  path_.string() + "' if stale)");
    }
    throw Error("cannot create lock '" + path_.string() + "': " + std::strerror(errno));
  }
  const auto pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] const auto written = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

RunLock::~RunLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

}  // namespace igccf::cli
