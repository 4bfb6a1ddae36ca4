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

// Drives the igccf executable end to end on a small synthetic dataset.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "igccf/model.hpp"
#include "support/synthetic.hpp"

#ifndef IGCCF_CLI_PATH
#error "IGCCF_CLI_PATH must point at the igccf executable"
#endif

namespace igccf {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / "igccf_cli_test";
    fs::remove_all(root_);
    fs::create_directories(root_);
    write_dataset(root_ / "toy.tsv", 1);
    write_dataset(root_ / "other.tsv", 2, 33);
    std::ofstream cfg(root_ / "toy.ini");
    cfg << "[data]\npath = toy.tsv\nk_core = 3\n\n"
        << "[split]\nseed = 5\n\n"
        << "[model]\ndim = 8\ndepth = 1\ntop_k = 10\n\n"
        << "[train]\nlearning_rate = 0.01\nbatch_size = 256\nepochs = 6\npatience = 2\ndropout = 0.1\nseed = 3\n\n"
        << "[eval]\ncutoffs = 5,20\n";
  }

  static void write_dataset(const fs::path& path, std::uint64_t seed, std::size_t n_items = 30) {
    const auto m = testing::block_dataset({.n_users = 60, .n_items = n_items, .n_blocks = 3, .in_block = 0.6,
                                           .min_per_user = 6, .seed = seed});
    std::ofstream out(path);
    out << "# user\titem\trating\n";
    for (UserIndex u = 0; u < m.n_users(); ++u)
      for (auto i : m.row(u)) out << m.users().key(u) << '\t' << m.items().key(i) << "\t4\n";
  }

  static Result run(const std::string& args) {
    const auto out = root_ / "stdout.txt", err = root_ / "stderr.txt";
    const std::string cmd = "cd '" + root_.string() + "' && '" + std::string(IGCCF_CLI_PATH) + "' " + args + " >'" +
                            out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  static Result prepared(const std::string& run_dir) {
    return run("prepare -c toy.ini --run-dir " + run_dir);
  }

  static inline fs::path root_;
};

TEST_F(Cli, PrepareIsDeterministic) {
  ASSERT_EQ(prepared("det").code, 0);
  const auto first = slurp(root_ / "det" / "manifest.json");
  ASSERT_EQ(prepared("det").code, 0);
  EXPECT_EQ(slurp(root_ / "det" / "manifest.json"), first);
  EXPECT_NE(first.find("\"item_universe_sha256\""), std::string::npos);
  EXPECT_NE(first.find("\"data.k_core\": \"3\""), std::string::npos);
  EXPECT_TRUE(fs::exists(root_ / "det" / "splits" / "transductive" / "split.header"));
  EXPECT_TRUE(fs::exists(root_ / "det" / "splits" / "inductive" / "unseen_eval.tsv"));
  EXPECT_FALSE(fs::exists(root_ / "det" / ".igccf.lock"));
}

TEST_F(Cli, MissingDataFileIsUsageError) {
  const auto r = run("prepare --data nowhere.tsv --run-dir missing");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nowhere.tsv"), std::string::npos);
}

TEST_F(Cli, InvalidDropoutRejectedBeforeWork) {
  ASSERT_EQ(prepared("badcfg").code, 0);
  const auto r = run("train -c toy.ini --run-dir badcfg --dropout 1.0");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("train.dropout"), std::string::npos);
  EXPECT_FALSE(fs::exists(root_ / "badcfg" / "models"));
  EXPECT_EQ(run("train -c toy.ini --run-dir badcfg --set train.nonsense=1").code, 2);
  EXPECT_EQ(run("train -c toy.ini --run-dir badcfg --cutoffs 0").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, TrainEvaluateRecommend) {
  ASSERT_EQ(prepared("full").code, 0);
  const auto start = std::chrono::steady_clock::now();
  const auto t = run("train -c toy.ini --run-dir full --epochs 4");
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 10.0);
  const auto model_path = root_ / "full" / "models" / "transductive.bin";
  ASSERT_TRUE(fs::exists(model_path));
  EXPECT_TRUE(fs::exists(root_ / "full" / "models" / "inductive.bin"));
  EXPECT_TRUE(fs::exists(root_ / "full" / "models" / "transductive_history.tsv"));
  // The flag overrides the config file.
  EXPECT_NE(slurp(root_ / "full" / "models" / "transductive.json").find("\"train.epochs\": \"4\""), std::string::npos);

  // Round trip through the library reader and writer.
  const auto model = load_model(model_path);
  std::ostringstream bytes;
  save_model(bytes, model);
  EXPECT_EQ(bytes.str(), slurp(model_path));

  // Same seed, same bytes.
  const auto before = slurp(model_path);
  ASSERT_EQ(run("train -c toy.ini --run-dir full --epochs 4 --protocol transductive").code, 0);
  EXPECT_EQ(slurp(model_path), before);

  const auto ev = run("evaluate -c toy.ini --run-dir full");
  ASSERT_EQ(ev.code, 0) << ev.err;
  EXPECT_NE(ev.out.find("transductive"), std::string::npos);
  const auto report = slurp(root_ / "full" / "reports" / "transductive.tsv");
  EXPECT_EQ(count_lines(report), 3u);
  EXPECT_NE(report.find("transductive\t5\t"), std::string::npos);
  EXPECT_NE(report.find("transductive\t20\t"), std::string::npos);

  const auto ind = run("evaluate -c toy.ini --run-dir full --protocol inductive");
  ASSERT_EQ(ind.code, 0) << ind.err;
  EXPECT_NE(ind.out.find("inductive evaluation"), std::string::npos);

  ASSERT_EQ(run("evaluate -c toy.ini --run-dir full --cutoffs 1").code, 0);
  EXPECT_EQ(count_lines(slurp(root_ / "full" / "reports" / "transductive.tsv")), 2u);

  const auto one = run("recommend --model full/models/transductive.bin --items i0 -n 5");
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(count_lines(one.out), 5u);
  EXPECT_EQ(one.out.find("i0\t"), std::string::npos);
  EXPECT_EQ(run("recommend --model full/models/transductive.bin --items i0 -n 5").out, one.out);
  EXPECT_EQ(count_lines(run("recommend --model full/models/transductive.bin --items i0,i3 -n 1").out), 1u);

  const auto partly = run("recommend --model full/models/transductive.bin --items i0,zzz -n 2");
  EXPECT_EQ(partly.code, 0);
  EXPECT_NE(partly.err.find("zzz"), std::string::npos);
  const auto none = run("recommend --model full/models/transductive.bin --items yyy,zzz");
  EXPECT_EQ(none.code, 1);
  EXPECT_NE(none.err.find("'yyy', 'zzz'"), std::string::npos);

  {
    std::ofstream profile(root_ / "profile.txt");
    profile << "i1\ni2\n";
  }
  const auto file = run("recommend --model full/models/transductive.bin --profile-file profile.txt -n 40");
  ASSERT_EQ(file.code, 0);
  EXPECT_EQ(file.out.find("i1\t"), std::string::npos);
  EXPECT_EQ(count_lines(file.out), 28u);
}

TEST_F(Cli, ArtifactMismatchesAreDetected) {
  ASSERT_EQ(prepared("a").code, 0);
  ASSERT_EQ(run("train -c toy.ini --run-dir a --epochs 2 --protocol transductive").code, 0);
  ASSERT_EQ(run("prepare -c toy.ini --run-dir b --data other.tsv").code, 0);
  const auto mixed = run("evaluate -c toy.ini --run-dir b --model a/models/transductive.bin");
  EXPECT_EQ(mixed.code, 1);
  EXPECT_NE(mixed.err.find("item universe"), std::string::npos);

  {
    std::ofstream tamper(root_ / "a" / "splits" / "transductive" / "test.tsv", std::ios::app);
    tamper << "u0\ti1\n";
  }
  const auto tampered = run("evaluate -c toy.ini --run-dir a");
  EXPECT_EQ(tampered.code, 1);
  EXPECT_NE(tampered.err.find("does not match the manifest"), std::string::npos);
}

TEST_F(Cli, LockFileBlocksConcurrentUse) {
  ASSERT_EQ(prepared("locked").code, 0);
  { std::ofstream lock(root_ / "locked" / ".igccf.lock"); }
  const auto r = run("train -c toy.ini --run-dir locked --epochs 1");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("locked"), std::string::npos);
  fs::remove(root_ / "locked" / ".igccf.lock");
}

TEST_F(Cli, SweepOutputs) {
  ASSERT_EQ(prepared("sweep").code, 0);
  const auto depth = run("sweep -c toy.ini --run-dir sweep --epochs 2 --parameter depth --grid 0,1,2 --seeds 1,2");
  ASSERT_EQ(depth.code, 0) << depth.err;
  const auto long_table = slurp(root_ / "sweep" / "reports" / "sweep_depth_long.tsv");
  // Header plus 3 values x 2 seeds x 4 metrics.
  EXPECT_EQ(count_lines(long_table), 1u + 24u);
  EXPECT_EQ(count_lines(slurp(root_ / "sweep" / "reports" / "sweep_depth_summary.tsv")), 4u);

  const auto frac = run("sweep -c toy.ini --run-dir sweep --epochs 2 --parameter train_user_fraction --grid 0.9,0.5");
  ASSERT_EQ(frac.code, 0) << frac.err;
  const auto summary = slurp(root_ / "sweep" / "reports" / "sweep_train_user_fraction_summary.tsv");
  EXPECT_NE(summary.find("seen_ndcg@20"), std::string::npos);
  EXPECT_NE(summary.find("unseen_ndcg@20"), std::string::npos);

  EXPECT_EQ(run("sweep -c toy.ini --run-dir sweep --parameter depth --grid ''").code, 2);
  EXPECT_EQ(run("sweep -c toy.ini --run-dir sweep --parameter width --grid 1").code, 2);
}

}  // namespace
}  // namespace igccf
