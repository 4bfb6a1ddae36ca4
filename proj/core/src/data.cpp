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

#include "igccf/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "igccf/errors.hpp"

namespace igccf {

// ---------------------------------------------------------------------------
// KeyIndex

KeyIndex::KeyIndex(std::vector<std::string> keys) : keys_(std::move(keys)) {
  index_.reserve(keys_.size());
  for (std::uint32_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i].empty()) throw InvalidArgument("KeyIndex: empty key at index " + std::to_string(i));
    if (!index_.emplace(keys_[i], i).second) throw InvalidArgument("KeyIndex: duplicate key '" + keys_[i] + "'");
  }
}

std::uint32_t KeyIndex::insert(const std::string& key) {
  if (key.empty()) throw InvalidArgument("KeyIndex: empty key");
  auto [it, inserted] = index_.emplace(key, static_cast<std::uint32_t>(keys_.size()));
  if (inserted) keys_.push_back(key);
  return it->second;
}

std::optional<std::uint32_t> KeyIndex::find(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// InteractionMatrix

InteractionMatrix::InteractionMatrix(KeyIndexPtr users, KeyIndexPtr items, std::vector<std::vector<ItemIndex>> rows)
    : users_(std::move(users)), items_(std::move(items)), rows_(std::move(rows)) {
  if (!users_ || !items_) throw InvalidArgument("InteractionMatrix: null key index");
  if (rows_.size() != users_->size()) {
    throw InvalidArgument("InteractionMatrix: " + std::to_string(rows_.size()) + " rows for " +
                          std::to_string(users_->size()) + " users");
  }
  const auto n_items = items_->size();
  for (std::size_t u = 0; u < rows_.size(); ++u) {
    const auto& r = rows_[u];
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (r[k] >= n_items) throw InvalidArgument("InteractionMatrix: item index out of range in row " + std::to_string(u));
      if (k > 0 && r[k] <= r[k - 1]) {
        throw InvalidArgument("InteractionMatrix: row " + std::to_string(u) + " is not strictly increasing");
      }
    }
    nnz_ += r.size();
  }
}

bool InteractionMatrix::contains(UserIndex u, ItemIndex i) const {
  const auto& r = rows_.at(u);
  return std::binary_search(r.begin(), r.end(), i);
}

std::vector<std::size_t> InteractionMatrix::item_degrees() const {
  std::vector<std::size_t> degree(n_items(), 0);
  for (const auto& r : rows_)
    for (ItemIndex i : r) ++degree[i];
  return degree;
}

std::vector<std::vector<UserIndex>> InteractionMatrix::columns() const {
  const auto degree = item_degrees();
  std::vector<std::vector<UserIndex>> cols(n_items());
  for (std::size_t i = 0; i < cols.size(); ++i) cols[i].reserve(degree[i]);
  for (UserIndex u = 0; u < rows_.size(); ++u)
    for (ItemIndex i : rows_[u]) cols[i].push_back(u);
  return cols;
}

std::size_t InteractionMatrix::n_active_users() const {
  return static_cast<std::size_t>(std::count_if(rows_.begin(), rows_.end(), [](const auto& r) { return !r.empty(); }));
}

bool InteractionMatrix::shares_universe_with(const InteractionMatrix& other) const {
  const bool users_same = users_ == other.users_ || *users_ == *other.users_;
  const bool items_same = items_ == other.items_ || *items_ == *other.items_;
  return users_same && items_same;
}

InteractionMatrix merge(const InteractionMatrix& a, const InteractionMatrix& b) {
  if (!a.shares_universe_with(b)) throw InvalidArgument("merge: matrices do not share a user/item universe");
  std::vector<std::vector<ItemIndex>> rows(a.n_users());
  for (UserIndex u = 0; u < rows.size(); ++u) {
    auto ra = a.row(u);
    auto rb = b.row(u);
    rows[u].reserve(ra.size() + rb.size());
    std::set_union(ra.begin(), ra.end(), rb.begin(), rb.end(), std::back_inserter(rows[u]));
  }
  return InteractionMatrix(a.user_index(), a.item_index(), std::move(rows));
}

// ---------------------------------------------------------------------------
// Ingestion

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string detect_delimiter(std::string_view line) {
  if (line.find('\t') != std::string_view::npos) return "\t";
  if (line.find("::") != std::string_view::npos) return "::";
  if (line.find(',') != std::string_view::npos) return ",";
  return " ";
}

std::vector<std::string_view> split_fields(std::string_view line, std::string_view delim) {
  std::vector<std::string_view> fields;
  if (delim == " ") {
    // Runs of blanks count as one separator.
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && line[pos] == ' ') ++pos;
      if (pos >= line.size()) break;
      auto end = line.find(' ', pos);
      if (end == std::string_view::npos) end = line.size();
      fields.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    return fields;
  }
  std::size_t pos = 0;
  while (true) {
    auto end = line.find(delim, pos);
    if (end == std::string_view::npos) {
      fields.push_back(trim(line.substr(pos)));
      break;
    }
    fields.push_back(trim(line.substr(pos, end - pos)));
    pos = end + delim.size();
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::vector<InteractionRecord> parse_interactions(std::istream& in, const LoadOptions& options,
                                                  const std::string& source_name) {
  std::vector<InteractionRecord> records;
  std::optional<std::string> delim = options.delimiter;
  bool header_pending = options.skip_header;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!delim) delim = detect_delimiter(line);
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = split_fields(line, *delim);
    if (fields.size() < 2 || fields.size() > 4) {
      throw ParseError(source_name, line_no, "expected 2 to 4 fields, got " + std::to_string(fields.size()));
    }
    InteractionRecord rec;
    rec.user_key = std::string(fields[0]);
    rec.item_key = std::string(fields[1]);
    if (rec.user_key.empty()) throw ParseError(source_name, line_no, "empty user key");
    if (rec.item_key.empty()) throw ParseError(source_name, line_no, "empty item key");
    if (fields.size() >= 3 && !fields[2].empty()) {
      double rating = 0.0;
      if (!parse_number(fields[2], rating) || !std::isfinite(rating)) {
        throw ParseError(source_name, line_no, "invalid rating '" + std::string(fields[2]) + "'");
      }
      rec.rating = rating;
    }
    if (fields.size() == 4 && !fields[3].empty()) {
      std::int64_t ts = 0;
      if (!parse_number(fields[3], ts)) {
        throw ParseError(source_name, line_no, "invalid timestamp '" + std::string(fields[3]) + "'");
      }
      rec.timestamp = ts;
    }
    if (options.positive_threshold && rec.rating && *rec.rating < *options.positive_threshold) continue;
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<InteractionRecord> load_interactions(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open interaction file '" + path.string() + "'");
  auto records = parse_interactions(in, options, path.string());
  if (records.empty()) throw EmptyDatasetError("no interactions loaded from '" + path.string() + "'");
  return records;
}

InteractionMatrix build_matrix(std::span<const InteractionRecord> records) {
  if (records.empty()) throw EmptyDatasetError("build_matrix: no records");
  auto users = std::make_shared<KeyIndex>();
  auto items = std::make_shared<KeyIndex>();
  std::vector<std::vector<ItemIndex>> rows;
  for (const auto& rec : records) {
    const auto u = users->insert(rec.user_key);
    const auto i = items->insert(rec.item_key);
    if (u >= rows.size()) rows.resize(u + 1);
    rows[u].push_back(i);
  }
  for (auto& r : rows) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  return InteractionMatrix(std::move(users), std::move(items), std::move(rows));
}

// ---------------------------------------------------------------------------
// k-core

InteractionMatrix kcore_filter(const InteractionMatrix& matrix, std::size_t k) {
  if (k < 1) throw InvalidArgument("kcore_filter: k must be >= 1");
  const auto n_users = matrix.n_users();
  const auto n_items = matrix.n_items();
  const auto columns = matrix.columns();

  std::vector<std::size_t> user_deg(n_users);
  std::vector<std::size_t> item_deg(n_items);
  for (UserIndex u = 0; u < n_users; ++u) user_deg[u] = matrix.row(u).size();
  for (ItemIndex i = 0; i < n_items; ++i) item_deg[i] = columns[i].size();

  std::vector<bool> user_alive(n_users, true);
  std::vector<bool> item_alive(n_items, true);
  // Work list of removed nodes whose incident edges still need retracting.
  std::vector<UserIndex> user_queue;
  std::vector<ItemIndex> item_queue;
  for (UserIndex u = 0; u < n_users; ++u)
    if (user_deg[u] < k) {
      user_alive[u] = false;
      user_queue.push_back(u);
    }
  for (ItemIndex i = 0; i < n_items; ++i)
    if (item_deg[i] < k) {
      item_alive[i] = false;
      item_queue.push_back(i);
    }

  while (!user_queue.empty() || !item_queue.empty()) {
    while (!user_queue.empty()) {
      const auto u = user_queue.back();
      user_queue.pop_back();
      for (ItemIndex i : matrix.row(u)) {
        if (!item_alive[i]) continue;
        if (--item_deg[i] < k) {
          item_alive[i] = false;
          item_queue.push_back(i);
        }
      }
    }
    while (!item_queue.empty()) {
      const auto i = item_queue.back();
      item_queue.pop_back();
      for (UserIndex u : columns[i]) {
        if (!user_alive[u]) continue;
        if (--user_deg[u] < k) {
          user_alive[u] = false;
          user_queue.push_back(u);
        }
      }
    }
  }

  std::vector<std::string> user_keys;
  std::vector<std::string> item_keys;
  std::vector<ItemIndex> item_remap(n_items, 0);
  for (ItemIndex i = 0; i < n_items; ++i) {
    if (!item_alive[i]) continue;
    item_remap[i] = static_cast<ItemIndex>(item_keys.size());
    item_keys.push_back(matrix.items().key(i));
  }
  std::vector<std::vector<ItemIndex>> rows;
  for (UserIndex u = 0; u < n_users; ++u) {
    if (!user_alive[u]) continue;
    user_keys.push_back(matrix.users().key(u));
    auto& r = rows.emplace_back();
    for (ItemIndex i : matrix.row(u))
      if (item_alive[i]) r.push_back(item_remap[i]);
  }
  if (user_keys.empty() || item_keys.empty()) {
    throw EmptyDatasetError("k-core filter with k=" + std::to_string(k) + " removed every interaction");
  }
  return InteractionMatrix(std::make_shared<KeyIndex>(std::move(user_keys)),
                           std::make_shared<KeyIndex>(std::move(item_keys)), std::move(rows));
}

// ---------------------------------------------------------------------------
// Splits

namespace {

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

void check_fraction(double value, const char* name) {
  if (!(value > 0.0 && value < 1.0)) {
    throw InvalidArgument(std::string(name) + " must be in (0, 1), got " + std::to_string(value));
  }
}

}  // namespace

SplitCounts per_user_split_counts(std::size_t n, double train_frac, double val_frac) {
  SplitCounts c;
  c.train = std::min(n, round_half_up(static_cast<double>(n) * train_frac));
  c.validation = std::max<std::size_t>(1, round_half_up(static_cast<double>(n) * val_frac));
  // Validation and test are guaranteed one cell each; train gives them up.
  const std::size_t min_train = 1;
  if (c.validation > n - 1 - min_train) c.validation = n - 1 - min_train;
  if (c.train + c.validation + 1 > n) c.train = n - c.validation - 1;
  c.test = n - c.train - c.validation;
  return c;
}

DatasetSplit split_per_user(const InteractionMatrix& matrix, double train_frac, double val_frac, std::uint64_t seed) {
  check_fraction(train_frac, "train_frac");
  check_fraction(val_frac, "val_frac");
  if (train_frac + val_frac >= 1.0) throw InvalidArgument("train_frac + val_frac must be < 1");

  std::mt19937_64 rng(seed);
  const auto n_users = matrix.n_users();
  std::vector<std::vector<ItemIndex>> train(n_users), val(n_users), test(n_users);
  for (UserIndex u = 0; u < n_users; ++u) {
    auto row = matrix.row(u);
    if (row.empty()) continue;
    if (row.size() < 3) {
      throw InvalidArgument("split_per_user: user '" + matrix.users().key(u) + "' has " + std::to_string(row.size()) +
                            " interactions, need at least 3");
    }
    std::vector<ItemIndex> items(row.begin(), row.end());
    std::shuffle(items.begin(), items.end(), rng);
    const auto counts = per_user_split_counts(items.size(), train_frac, val_frac);
    auto first = items.begin();
    train[u].assign(first, first + static_cast<std::ptrdiff_t>(counts.train));
    first += static_cast<std::ptrdiff_t>(counts.train);
    val[u].assign(first, first + static_cast<std::ptrdiff_t>(counts.validation));
    first += static_cast<std::ptrdiff_t>(counts.validation);
    test[u].assign(first, items.end());
    std::sort(train[u].begin(), train[u].end());
    std::sort(val[u].begin(), val[u].end());
    std::sort(test[u].begin(), test[u].end());
  }
  return DatasetSplit{InteractionMatrix(matrix.user_index(), matrix.item_index(), std::move(train)),
                      InteractionMatrix(matrix.user_index(), matrix.item_index(), std::move(val)),
                      InteractionMatrix(matrix.user_index(), matrix.item_index(), std::move(test)),
                      seed,
                      train_frac,
                      val_frac};
}

UserHoldoutSplit split_user_holdout(const InteractionMatrix& matrix, double unseen_frac, double profile_build_frac,
                                    std::uint64_t seed) {
  check_fraction(unseen_frac, "unseen_frac");
  check_fraction(profile_build_frac, "profile_build_frac");

  std::mt19937_64 rng(seed);
  const auto n_users = matrix.n_users();
  std::vector<UserIndex> order(n_users);
  std::iota(order.begin(), order.end(), UserIndex{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_unseen = std::min(n_users, round_half_up(static_cast<double>(n_users) * unseen_frac));

  std::vector<UserIndex> unseen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_unseen));
  std::sort(unseen.begin(), unseen.end());

  std::vector<std::vector<ItemIndex>> seen_rows(n_users), build(n_users), eval(n_users);
  std::vector<bool> is_unseen(n_users, false);
  for (auto u : unseen) is_unseen[u] = true;

  for (UserIndex u = 0; u < n_users; ++u) {
    auto row = matrix.row(u);
    if (!is_unseen[u]) {
      seen_rows[u].assign(row.begin(), row.end());
      continue;
    }
    if (row.size() < 2) {
      throw InvalidArgument("split_user_holdout: unseen user '" + matrix.users().key(u) + "' has " +
                            std::to_string(row.size()) + " interactions, need at least 2");
    }
    std::vector<ItemIndex> items(row.begin(), row.end());
    std::shuffle(items.begin(), items.end(), rng);
    auto n_build = round_half_up(static_cast<double>(items.size()) * profile_build_frac);
    n_build = std::clamp<std::size_t>(n_build, 1, items.size() - 1);
    build[u].assign(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(n_build));
    eval[u].assign(items.begin() + static_cast<std::ptrdiff_t>(n_build), items.end());
    std::sort(build[u].begin(), build[u].end());
    std::sort(eval[u].begin(), eval[u].end());
  }
  return UserHoldoutSplit{InteractionMatrix(matrix.user_index(), matrix.item_index(), std::move(seen_rows)),
                          InteractionMatrix(matrix.user_index(), matrix.item_index(), std::move(build)),
                          InteractionMatrix(matrix.user_index(), matrix.item_index(), std::move(eval)),
                          std::move(unseen),
                          seed,
                          unseen_frac,
                          profile_build_frac};
}

}  // namespace igccf
