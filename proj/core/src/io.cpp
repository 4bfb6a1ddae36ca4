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

#include "igccf/io.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "igccf/errors.hpp"

namespace igccf {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return in;
}

// key=value lines.
std::map<std::string, std::string> read_header(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path.string(), line_no, "expected key=value");
    values[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return values;
}

const std::string& header_value(const std::map<std::string, std::string>& header, const std::string& key,
                                const std::filesystem::path& path) {
  auto it = header.find(key);
  if (it == header.end()) throw FormatError("'" + path.string() + "' is missing '" + key + "'");
  return it->second;
}

std::string format_fraction(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

void write_keys(const std::filesystem::path& path, const KeyIndex& keys) {
  auto out = open_out(path);
  for (const auto& k : keys.keys()) out << k << '\n';
}

KeyIndex read_keys(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::string> keys;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    keys.push_back(line);
  }
  return KeyIndex(std::move(keys));
}

void write_interactions(std::ostream& out, const InteractionMatrix& matrix) {
  for (UserIndex u = 0; u < matrix.n_users(); ++u)
    for (ItemIndex i : matrix.row(u)) out << matrix.users().key(u) << '\t' << matrix.items().key(i) << '\n';
}

void write_interactions(const std::filesystem::path& path, const InteractionMatrix& matrix) {
  auto out = open_out(path);
  write_interactions(out, matrix);
}

InteractionMatrix read_interactions(const std::filesystem::path& path, KeyIndexPtr users, KeyIndexPtr items) {
  LoadOptions options;
  options.delimiter = "\t";
  auto in = open_in(path);
  const auto records = parse_interactions(in, options, path.string());
  std::vector<std::vector<ItemIndex>> rows(users->size());
  std::size_t line = 0;
  for (const auto& rec : records) {
    ++line;
    auto u = users->find(rec.user_key);
    auto i = items->find(rec.item_key);
    if (!u) throw ParseError(path.string(), line, "unknown user key '" + rec.user_key + "'");
    if (!i) throw ParseError(path.string(), line, "unknown item key '" + rec.item_key + "'");
    rows[*u].push_back(*i);
  }
  for (auto& r : rows) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  return InteractionMatrix(std::move(users), std::move(items), std::move(rows));
}

void write_split(const std::filesystem::path& dir, const DatasetSplit& split) {
  std::filesystem::create_directories(dir);
  write_keys(dir / "users.tsv", split.train.users());
  write_keys(dir / "items.tsv", split.train.items());
  write_interactions(dir / "train.tsv", split.train);
  write_interactions(dir / "validation.tsv", split.validation);
  write_interactions(dir / "test.tsv", split.test);
  auto header = open_out(dir / "split.header");
  header << "kind=per_user\n"
         << "seed=" << split.seed << '\n'
         << "train_frac=" << format_fraction(split.train_frac) << '\n'
         << "val_frac=" << format_fraction(split.val_frac) << '\n'
         << "train_nnz=" << split.train.nnz() << '\n'
         << "validation_nnz=" << split.validation.nnz() << '\n'
         << "test_nnz=" << split.test.nnz() << '\n';
}

DatasetSplit read_split(const std::filesystem::path& dir) {
  const auto header_path = dir / "split.header";
  const auto header = read_header(header_path);
  if (header_value(header, "kind", header_path) != "per_user") {
    throw FormatError("'" + header_path.string() + "' is not a per-user split");
  }
  auto users = std::make_shared<const KeyIndex>(read_keys(dir / "users.tsv"));
  auto items = std::make_shared<const KeyIndex>(read_keys(dir / "items.tsv"));
  return DatasetSplit{read_interactions(dir / "train.tsv", users, items),
                      read_interactions(dir / "validation.tsv", users, items),
                      read_interactions(dir / "test.tsv", users, items),
                      std::stoull(header_value(header, "seed", header_path)),
                      std::stod(header_value(header, "train_frac", header_path)),
                      std::stod(header_value(header, "val_frac", header_path))};
}

void write_holdout(const std::filesystem::path& dir, const UserHoldoutSplit& split) {
  std::filesystem::create_directories(dir);
  write_keys(dir / "users.tsv", split.train_users.users());
  write_keys(dir / "items.tsv", split.train_users.items());
  write_interactions(dir / "train_users.tsv", split.train_users);
  write_interactions(dir / "unseen_build.tsv", split.unseen_build);
  write_interactions(dir / "unseen_eval.tsv", split.unseen_eval);
  auto header = open_out(dir / "split.header");
  header << "kind=user_holdout\n"
         << "seed=" << split.seed << '\n'
         << "unseen_frac=" << format_fraction(split.unseen_frac) << '\n'
         << "profile_build_frac=" << format_fraction(split.profile_build_frac) << '\n'
         << "unseen_users=" << split.unseen_users.size() << '\n'
         << "train_users_nnz=" << split.train_users.nnz() << '\n'
         << "unseen_build_nnz=" << split.unseen_build.nnz() << '\n'
         << "unseen_eval_nnz=" << split.unseen_eval.nnz() << '\n';
}

UserHoldoutSplit read_holdout(const std::filesystem::path& dir) {
  const auto header_path = dir / "split.header";
  const auto header = read_header(header_path);
  if (header_value(header, "kind", header_path) != "user_holdout") {
    throw FormatError("'" + header_path.string() + "' is not a user-holdout split");
  }
  auto users = std::make_shared<const KeyIndex>(read_keys(dir / "users.tsv"));
  auto items = std::make_shared<const KeyIndex>(read_keys(dir / "items.tsv"));
  auto build = read_interactions(dir / "unseen_build.tsv", users, items);
  auto eval = read_interactions(dir / "unseen_eval.tsv", users, items);
  std::vector<UserIndex> unseen;
  for (UserIndex u = 0; u < build.n_users(); ++u)
    if (!build.row(u).empty() || !eval.row(u).empty()) unseen.push_back(u);
  return UserHoldoutSplit{read_interactions(dir / "train_users.tsv", users, items),
                          std::move(build),
                          std::move(eval),
                          std::move(unseen),
                          std::stoull(header_value(header, "seed", header_path)),
                          std::stod(header_value(header, "unseen_frac", header_path)),
                          std::stod(header_value(header, "profile_build_frac", header_path))};
}

void write_edge_list(const std::filesystem::path& path, const ItemGraph& graph, const KeyIndex& items) {
  auto out = open_out(path);
  out << std::setprecision(17);
  for (ItemIndex i = 0; i < graph.n_items(); ++i)
    for (const auto& e : graph.row(i)) out << items.key(i) << '\t' << items.key(e.neighbor) << '\t' << e.weight << '\n';
}

}  // namespace igccf
