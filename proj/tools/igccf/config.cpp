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

#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <array>
#include <sstream>

#include "igccf/errors.hpp"

namespace igccf::cli {

namespace pt = boost::property_tree;

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      {"run.dir", "run-dir", "run directory holding every artifact"},
      {"data.path", "data", "raw interaction file"},
      {"data.threshold", "threshold", "minimum rating kept as positive, or none"},
      {"data.delimiter", "delimiter", "field delimiter: auto, tab, comma, space, or a literal"},
      {"data.skip_header", "skip-header", "treat the first line as a header"},
      {"data.k_core", "k-core", "k-core filter level (1 keeps everything)"},
      {"split.seed", "split-seed", "seed for every split"},
      {"split.train_frac", "train-frac", "per-user training fraction"},
      {"split.val_frac", "val-frac", "per-user validation fraction"},
      {"split.unseen_frac", "unseen-frac", "fraction of users held out as unseen"},
      {"split.profile_build_frac", "profile-build-frac", "share of an unseen profile used to embed the user"},
      {"split.protocols", "protocols", "comma list of transductive, inductive"},
      {"model.dim", "dim", "embedding size"},
      {"model.depth", "depth", "convolution depth"},
      {"model.top_k", "top-k", "neighbours kept per item, or none"},
      {"model.self_loop", "self-loop", "add unit self-loops to P"},
      {"model.row_normalize", "row-normalize", "normalise rows of P to sum 1"},
      {"model.weighting", "weighting", "profile weights: uniform or mean"},
      {"train.learning_rate", "lr", "Adam learning rate"},
      {"train.batch_size", "batch-size", "triples per batch"},
      {"train.epochs", "epochs", "maximum epochs"},
      {"train.patience", "patience", "non-improving evaluations tolerated"},
      {"train.early_stop", "early-stop", "validation metric, e.g. ndcg@20"},
      {"train.dropout", "dropout", "user-profile dropout probability"},
      {"train.rescale_dropout", "rescale-dropout", "scale surviving entries by 1/(1-p)"},
      {"train.l2", "l2", "L2 coefficient"},
      {"train.l2_scope", "l2-scope", "batch (touched rows) or all"},
      {"train.seed", "seed", "training seed"},
      {"train.retrain_merged", "retrain-merged", "retrain on train+validation for the best epoch count"},
      {"train.adam_beta1", "adam-beta1", "Adam beta1"},
      {"train.adam_beta2", "adam-beta2", "Adam beta2"},
      {"train.adam_epsilon", "adam-epsilon", "Adam epsilon"},
      {"eval.cutoffs", "cutoffs", "comma list of ranking cutoffs"},
  };
  return keys;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Values {
 public:
  explicit Values(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  std::optional<std::string> raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& rule) const {
    throw ConfigError(key + ": " + rule + ", got '" + raw(key).value_or("") + "'");
  }

  template <typename T>
  void number(const std::string& key, T& out) const {
    const auto v = raw(key);
    if (!v) return;
    T parsed{};
    const auto* end = v->data() + v->size();
    const auto [ptr, ec] = std::from_chars(v->data(), end, parsed);
    if (ec != std::errc{} || ptr != end) fail(key, "expected a number");
    out = parsed;
  }

  void boolean(const std::string& key, bool& out) const {
    const auto v = raw(key);
    if (!v) return;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") {
      out = true;
    } else if (*v == "false" || *v == "0" || *v == "no" || *v == "off") {
      out = false;
    } else {
      fail(key, "expected true or false");
    }
  }

 private:
  std::map<std::string, std::string> values_;
};

std::map<std::string, std::string> read_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file '" + path.string() + "' does not exist");
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config file: " + std::string(e.what()));
  }
  std::map<std::string, std::string> flat;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config file: key '" + section + "' must live in a section");
    for (const auto& [name, value] : body) flat[section + "." + name] = trim(value.data());
  }
  return flat;
}

std::string unescape_delimiter(const std::string& text) {
  if (text == "tab" || text == "\\t") return "\t";
  if (text == "comma") return ",";
  if (text == "space") return " ";
  return text;
}

}  // namespace

std::vector<std::size_t> parse_cutoffs(const std::string& text) {
  std::vector<std::size_t> cutoffs;
  for (const auto& token : split_list(text)) {
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), n);
    if (ec != std::errc{} || ptr != token.data() + token.size() || n < 1) {
      throw ConfigError("eval.cutoffs: '" + token + "' is not a positive integer");
    }
    cutoffs.push_back(n);
  }
  if (cutoffs.empty()) throw ConfigError("eval.cutoffs: no cutoffs given");
  std::sort(cutoffs.begin(), cutoffs.end());
  cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());
  return cutoffs;
}

RunConfig load_run_config(const std::optional<std::filesystem::path>& path,
                          const std::map<std::string, std::string>& overrides) {
  auto flat = path ? read_file(*path) : std::map<std::string, std::string>{};
  for (const auto& [k, v] : overrides) flat[k] = trim(v);
  for (const auto& [k, v] : flat) {
    const auto& keys = config_keys();
    if (std::none_of(keys.begin(), keys.end(), [&](const ConfigKey& c) { return k == c.key; })) {
      throw ConfigError("unknown config key '" + k + "'");
    }
  }
  const Values values(flat);
  RunConfig c;

  if (auto v = values.raw("run.dir")) c.run_dir = *v;
  if (c.run_dir.empty()) throw ConfigError("run.dir: a run directory is required (--run-dir)");

  if (auto v = values.raw("data.path")) {
    // Relative data paths resolve against the config file's directory.
    std::filesystem::path p(*v);
    if (p.is_relative() && path && !overrides.count("data.path")) p = path->parent_path() / p;
    c.data_path = p;
  }
  if (auto v = values.raw("data.threshold"); v && *v != "none") {
    double t = 0.0;
    values.number("data.threshold", t);
    c.load.positive_threshold = t;
  }
  if (auto v = values.raw("data.delimiter"); v && *v != "auto") {
    c.load.delimiter = unescape_delimiter(*v);
    if (c.load.delimiter->empty()) values.fail("data.delimiter", "must not be empty");
  }
  values.boolean("data.skip_header", c.load.skip_header);
  values.number("data.k_core", c.k_core);
  if (c.k_core < 1) values.fail("data.k_core", "must be >= 1");

  values.number("split.seed", c.split_seed);
  auto& po = c.protocol_options;
  values.number("split.train_frac", po.train_frac);
  values.number("split.val_frac", po.val_frac);
  values.number("split.unseen_frac", po.unseen_frac);
  values.number("split.profile_build_frac", po.profile_build_frac);
  const auto fraction = [&](const char* key, double v) {
    if (!(v > 0.0 && v < 1.0)) values.fail(key, "must be in (0, 1)");
  };
  fraction("split.train_frac", po.train_frac);
  fraction("split.val_frac", po.val_frac);
  fraction("split.unseen_frac", po.unseen_frac);
  fraction("split.profile_build_frac", po.profile_build_frac);
  if (po.train_frac + po.val_frac >= 1.0) values.fail("split.val_frac", "train_frac + val_frac must be < 1");
  if (auto v = values.raw("split.protocols")) {
    c.protocols.clear();
    for (const auto& name : split_list(*v)) {
      try {
        c.protocols.push_back(parse_protocol(name));
      } catch (const InvalidArgument&) {
        values.fail("split.protocols", "expected transductive and/or inductive");
      }
    }
    if (c.protocols.empty()) values.fail("split.protocols", "must name at least one protocol");
  }

  auto& t = c.train;
  auto& m = t.model;
  values.number("model.dim", m.dim);
  values.number("model.depth", m.depth);
  if (auto v = values.raw("model.top_k")) {
    if (*v == "none" || *v == "full") {
      m.top_k.reset();
    } else {
      std::size_t k = 0;
      values.number("model.top_k", k);
      m.top_k = k;
    }
  }
  values.boolean("model.self_loop", m.propagation.self_loop);
  values.boolean("model.row_normalize", m.propagation.row_normalize);
  if (auto v = values.raw("model.weighting")) {
    if (*v == "uniform") {
      m.weighting = ProfileWeighting::Uniform;
    } else if (*v == "mean") {
      m.weighting = ProfileWeighting::Mean;
    } else {
      values.fail("model.weighting", "expected uniform or mean");
    }
  }
  values.number("train.learning_rate", t.learning_rate);
  values.number("train.batch_size", t.batch_size);
  values.number("train.epochs", t.epochs);
  values.number("train.patience", t.patience);
  if (auto v = values.raw("train.early_stop")) {
    try {
      t.early_stop = parse_metric(*v);
    } catch (const InvalidArgument&) {
      values.fail("train.early_stop", "expected recall@N or ndcg@N");
    }
  }
  values.number("train.dropout", m.dropout);
  values.boolean("train.rescale_dropout", t.rescale_dropout);
  values.number("train.l2", m.l2);
  if (auto v = values.raw("train.l2_scope")) {
    if (*v == "batch") {
      t.l2_scope = L2Scope::BatchRows;
    } else if (*v == "all") {
      t.l2_scope = L2Scope::AllRows;
    } else {
      values.fail("train.l2_scope", "expected batch or all");
    }
  }
  values.number("train.seed", t.seed);
  values.boolean("train.retrain_merged", po.retrain_merged);
  values.number("train.adam_beta1", t.adam.beta1);
  values.number("train.adam_beta2", t.adam.beta2);
  values.number("train.adam_epsilon", t.adam.epsilon);
  if (auto v = values.raw("eval.cutoffs")) po.cutoffs = parse_cutoffs(*v);

  try {
    t.validate();
  } catch (const InvalidArgument& e) {
    // Map library field names to config keys.
    static const std::map<std::string, std::string> prefix{
        {"dim", "model.dim"},           {"top_k", "model.top_k"},         {"dropout", "train.dropout"},
        {"l2", "train.l2"},             {"learning_rate", "train.learning_rate"},
        {"batch_size", "train.batch_size"}, {"epochs", "train.epochs"}, {"adam_beta1", "train.adam_beta1"},
        {"adam_beta2", "train.adam_beta2"}, {"adam_epsilon", "train.adam_epsilon"},
        {"early_stop", "train.early_stop"}};
    std::string message = e.what();
    const auto colon = message.find(':');
    if (colon != std::string::npos) {
      const auto it = prefix.find(message.substr(0, colon));
      if (it != prefix.end()) message = it->second + message.substr(colon);
    }
    throw ConfigError(message);
  }
  return c;
}

std::map<std::string, std::string> describe(const RunConfig& c) {
  // Shortest round-trip text.
  const auto num = [](auto v) {
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
  };
  const auto& t = c.train;
  const auto& m = t.model;
  const auto& po = c.protocol_options;
  std::string protocols, cutoffs;
  for (auto p : c.protocols) protocols += (protocols.empty() ? "" : ",") + to_string(p);
  for (auto n : po.cutoffs) cutoffs += (cutoffs.empty() ? "" : ",") + std::to_string(n);
  std::string delimiter = c.load.delimiter.value_or("auto");
  if (delimiter == "\t") delimiter = "tab";
  return {
      {"data.path", c.data_path ? c.data_path->string() : ""},
      {"data.threshold", c.load.positive_threshold ? num(*c.load.positive_threshold) : "none"},
      {"data.delimiter", delimiter},
      {"data.skip_header", c.load.skip_header ? "true" : "false"},
      {"data.k_core", num(c.k_core)},
      {"split.seed", num(c.split_seed)},
      {"split.train_frac", num(po.train_frac)},
      {"split.val_frac", num(po.val_frac)},
      {"split.unseen_frac", num(po.unseen_frac)},
      {"split.profile_build_frac", num(po.profile_build_frac)},
      {"split.protocols", protocols},
      {"model.dim", num(m.dim)},
      {"model.depth", num(m.depth)},
      {"model.top_k", m.top_k ? num(*m.top_k) : "none"},
      {"model.self_loop", m.propagation.self_loop ? "true" : "false"},
      {"model.row_normalize", m.propagation.row_normalize ? "true" : "false"},
      {"model.weighting", m.weighting == ProfileWeighting::Mean ? "mean" : "uniform"},
      {"train.learning_rate", num(t.learning_rate)},
      {"train.batch_size", num(t.batch_size)},
      {"train.epochs", num(t.epochs)},
      {"train.patience", num(t.patience)},
      {"train.early_stop", t.early_stop.name()},
      {"train.dropout", num(m.dropout)},
      {"train.rescale_dropout", t.rescale_dropout ? "true" : "false"},
      {"train.l2", num(m.l2)},
      {"train.l2_scope", t.l2_scope == L2Scope::AllRows ? "all" : "batch"},
      {"train.seed", num(t.seed)},
      {"train.retrain_merged", po.retrain_merged ? "true" : "false"},
      {"train.adam_beta1", num(t.adam.beta1)},
      {"train.adam_beta2", num(t.adam.beta2)},
      {"train.adam_epsilon", num(t.adam.epsilon)},
      {"eval.cutoffs", cutoffs},
  };
}

}  // namespace igccf::cli
