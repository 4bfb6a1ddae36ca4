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

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "igccf/errors.hpp"
#include "igccf/model.hpp"
#include "igccf/training.hpp"

namespace igccf {

namespace {

constexpr std::array<char, 8> kModelMagic{'I', 'G', 'C', 'C', 'F', 'M', 'D', 'L'};
constexpr std::array<char, 8> kAdamMagic{'I', 'G', 'C', 'C', 'F', 'A', 'D', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

constexpr std::uint32_t kFlagSelfLoop = 1u << 0;
constexpr std::uint32_t kFlagRowNormalize = 1u << 1;
constexpr std::uint32_t kFlagMeanWeighting = 1u << 2;

// Little-endian regardless of host order.
class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t n) { out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n)); }

  template <typename U>
  void uint(U value) {
    std::array<unsigned char, sizeof(U)> b{};
    for (std::size_t k = 0; k < sizeof(U); ++k) b[k] = static_cast<unsigned char>(value >> (8 * k));
    bytes(b.data(), b.size());
  }
  void u32(std::uint32_t v) { uint(v); }
  void u64(std::uint64_t v) { uint(v); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw FormatError("model file truncated");
  }

  template <typename U>
  U uint() {
    std::array<unsigned char, sizeof(U)> b{};
    bytes(b.data(), b.size());
    U v = 0;
    for (std::size_t k = 0; k < sizeof(U); ++k) v |= static_cast<U>(b[k]) << (8 * k);
    return v;
  }
  std::uint32_t u32() { return uint<std::uint32_t>(); }
  std::uint64_t u64() { return uint<std::uint64_t>(); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }

 private:
  std::istream& in_;
};

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFull) throw FormatError(std::string(what) + " does not fit the model file format");
  return static_cast<std::uint32_t>(v);
}

void write_dense_f64(Writer& w, const DenseMatrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.f64(m(r, c));
}

DenseMatrix read_dense_f64(Reader& r, Eigen::Index rows, Eigen::Index cols) {
  DenseMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = r.f64();
  return m;
}

}  // namespace

void save_model(std::ostream& out, const TrainedModel& model) {
  Writer w(out);
  const auto& cfg = model.config();
  w.bytes(kModelMagic.data(), kModelMagic.size());
  w.u32(kFormatVersion);
  w.u32(checked_u32(model.dim(), "d"));
  w.u32(checked_u32(cfg.depth, "depth"));
  w.u32(checked_u32(cfg.top_k.value_or(0), "top_k"));
  w.f64(cfg.dropout);
  w.f64(cfg.l2);
  std::uint32_t flags = 0;
  if (cfg.propagation.self_loop) flags |= kFlagSelfLoop;
  if (cfg.propagation.row_normalize) flags |= kFlagRowNormalize;
  if (cfg.weighting == ProfileWeighting::Mean) flags |= kFlagMeanWeighting;
  w.u32(flags);
  w.u32(checked_u32(model.n_items(), "item count"));
  for (const auto& key : model.items().keys()) {
    w.u32(checked_u32(key.size(), "item key length"));
    w.bytes(key.data(), key.size());
  }
  const auto& x0 = model.base_embeddings();
  for (Eigen::Index r = 0; r < x0.rows(); ++r)
    for (Eigen::Index c = 0; c < x0.cols(); ++c) w.f32(static_cast<float>(x0(r, c)));
  const auto triplets = model.propagation().triplets();
  w.u64(triplets.size());
  for (const auto& t : triplets) {
    w.u32(t.row);
    w.u32(t.col);
    w.f64(t.weight);
  }
  if (!out) throw Error("failed writing model");
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file '" + path.string() + "'");
  save_model(out, model);
}

TrainedModel load_model(std::istream& in) {
  Reader r(in);
  std::array<char, 8> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kModelMagic) throw FormatError("not an IGCCF model file (bad magic)");
  const auto version = r.u32();
  if (version != kFormatVersion) throw FormatError("unsupported model format version " + std::to_string(version));
  ModelConfig cfg;
  cfg.dim = r.u32();
  cfg.depth = r.u32();
  const auto top_k = r.u32();
  cfg.top_k = top_k == 0 ? std::nullopt : std::optional<std::size_t>(top_k);
  cfg.dropout = r.f64();
  cfg.l2 = r.f64();
  const auto flags = r.u32();
  cfg.propagation.self_loop = (flags & kFlagSelfLoop) != 0;
  cfg.propagation.row_normalize = (flags & kFlagRowNormalize) != 0;
  cfg.weighting = (flags & kFlagMeanWeighting) != 0 ? ProfileWeighting::Mean : ProfileWeighting::Uniform;
  const auto n_items = r.u32();

  std::vector<std::string> keys(n_items);
  for (auto& key : keys) {
    const auto len = r.u32();
    if (len > (1u << 20)) throw FormatError("implausible item key length");
    key.resize(len);
    r.bytes(key.data(), len);
  }
  ItemEmbeddings x0(n_items, static_cast<Eigen::Index>(cfg.dim));
  for (Eigen::Index i = 0; i < x0.rows(); ++i)
    for (Eigen::Index c = 0; c < x0.cols(); ++c) x0(i, c) = static_cast<double>(r.f32());
  const auto nnz = r.u64();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(nnz, 1u << 26)));
  for (std::uint64_t k = 0; k < nnz; ++k) {
    Triplet t{};
    t.row = r.u32();
    t.col = r.u32();
    t.weight = r.f64();
    triplets.push_back(t);
  }
  return TrainedModel(cfg, std::make_shared<const KeyIndex>(std::move(keys)),
                      std::make_shared<const PropagationMatrix>(n_items, triplets), std::move(x0));
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path.string() + "'");
  return load_model(in);
}

void save_checkpoint(const std::filesystem::path& path, const TrainedModel& model, const AdamState& adam,
                     std::size_t epochs_done) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint '" + path.string() + "'");
  save_model(out, model);
  Writer w(out);
  w.bytes(kAdamMagic.data(), kAdamMagic.size());
  w.u64(adam.step);
  w.u64(epochs_done);
  // Full-precision parameters so a resumed run continues exactly.
  write_dense_f64(w, model.base_embeddings());
  write_dense_f64(w, adam.first_moment);
  write_dense_f64(w, adam.second_moment);
  if (!out) throw Error("failed writing checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint '" + path.string() + "'");
  auto model = load_model(in);
  Reader r(in);
  std::array<char, 8> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kAdamMagic) throw FormatError("checkpoint has no Adam appendix");
  AdamState adam;
  adam.step = r.u64();
  const auto epochs = r.u64();
  const auto rows = static_cast<Eigen::Index>(model.n_items());
  const auto cols = static_cast<Eigen::Index>(model.dim());
  auto x0 = read_dense_f64(r, rows, cols);
  adam.first_moment = read_dense_f64(r, rows, cols);
  adam.second_moment = read_dense_f64(r, rows, cols);
  TrainedModel exact(model.config(), model.item_index(), model.propagation_ptr(), std::move(x0));
  return Checkpoint{std::move(exact), std::move(adam), static_cast<std::size_t>(epochs)};
}

}  // namespace igccf
