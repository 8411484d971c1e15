/* Copyright 2026 The KGPL Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
  const std::string cmd = std::string(KGPL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / ("kgpl_cli_" + std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
    std::ofstream raw(root_ / "raw.tsv");
    for (int u = 0; u < 20; ++u)
      for (int k = 0; k < 5; ++k) raw << u << '\t' << (u % 2) + 2 * ((u + k * 3) % 8) << '\n';
    std::ofstream kg(root_ / "kg.txt");
    for (int i = 0; i < 16; ++i) kg << i << " 0 " << 16 + i % 2 << '\n';
  }
  static std::string p(const std::string& name) { return (root_ / name).string(); }
  static fs::path root_;
};

fs::path Cli::root_;

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("train --dataset " + p("missing") + " --out-dir " + p("x")), 2);
  EXPECT_EQ(run("prepare --kind generic-tsv --raw " + p("raw.tsv") + " --kg " + p("kg.txt") +
                " --out-dir " + p("ds")),
            0);
  EXPECT_EQ(run("train --dataset " + p("ds") + " --set dim=4 --set batch_size=30 --set lr=1e300" +
                " --out-dir " + p("bad")),
            3);
  EXPECT_TRUE(fs::exists(root_ / "bad" / "last_batch.tsv"));
  EXPECT_EQ(run("train --dataset " + p("ds") + " --set batch_size=31 --out-dir " + p("bad2")), 1);
  EXPECT_EQ(run("train --dataset " + p("ds") +
                " --set dim=4 --set batch_size=30 --set epochs=1 --set h=2 --out-dir " + p("run")),
            0);
  EXPECT_TRUE(fs::exists(root_ / "run" / "best_f.ckpt"));
  EXPECT_TRUE(fs::exists(root_ / "run" / "metrics_log.csv"));
  EXPECT_EQ(run("train --dataset " + p("ds") + " --set dim=4 --set batch_size=30 --dry-run" +
                " --out-dir " + p("dry")),
            0);
  EXPECT_EQ(run("evaluate --dataset " + p("ds") + " --checkpoint KGPL=" + p("run/best_f.ckpt") +
                " --top-popular --ks 5,10 --out-dir " + p("eval")),
            0);
  EXPECT_TRUE(fs::exists(root_ / "eval" / "metrics.csv"));
  EXPECT_EQ(run("analyze winners --dataset " + p("ds") + " --checkpoint " +
                p("run/best_f.ckpt") + " --top-popular --out-dir " + p("win")),
            0);
  EXPECT_EQ(run("analyze pathcounts --dataset " + p("ds") + " --user 0 --horizon 2 --out " +
                p("pc.csv")),
            0);
  EXPECT_EQ(run("gradcheck --seeds 2"), 0);
}

}  // namespace
