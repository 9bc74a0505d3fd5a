// Copyright 2026 The astsim Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "astsim/cli.hpp"

namespace astsim {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("astsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  void write(const std::string& name, const std::string& text) {
    std::ofstream(path(name)) << text;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, FullPipeline) {
  ASSERT_EQ(run({"gen-corpus", "--synthetic", "12", "--variants", "2", "--seed", "3", "--out",
                 path("corpus.jsonl"), "--pairs-out", path("pairs.jsonl")}),
            cli::kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("# astsim gen-corpus "), std::string::npos);
  EXPECT_NE(out_.str().find("functions: 12"), std::string::npos);
  EXPECT_NE(out_.str().find("asts: 24"), std::string::npos);
  EXPECT_NE(out_.str().find("homologous"), std::string::npos);

  ASSERT_EQ(run({"train", path("corpus.jsonl"), "--epochs", "2", "--d-e", "8", "--hidden", "8",
                 "--seed", "3", "--out", path("model.ckpt"), "--trace", path("trace.jsonl"),
                 "--test-pairs-out", path("test.jsonl")}),
            cli::kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("epoch 2 train_loss="), std::string::npos);
  EXPECT_NE(out_.str().find("best epoch: "), std::string::npos);
  EXPECT_NE(out_.str().find("checkpoint: "), std::string::npos);
  EXPECT_TRUE(fs::exists(path("model.ckpt")));
  {
    std::ifstream trace(path("trace.jsonl"));
    std::string line;
    int lines = 0;
    while (std::getline(trace, line)) ++lines;
    EXPECT_EQ(lines, 2);
  }

  ASSERT_EQ(run({"encode", path("corpus.jsonl"), "--ckpt", path("model.ckpt"), "--out",
                 path("enc.db"), "--jobs", "2"}),
            cli::kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("encoded: 24 functions"), std::string::npos);

  // A single-function file for compare/search.
  {
    std::ifstream corpus(path("corpus.jsonl"));
    std::string first;
    std::getline(corpus, first);
    write("query.json", first + "\n");
  }
  ASSERT_EQ(run({"compare", path("query.json"), path("query.json"), "--ckpt", path("model.ckpt")}),
            cli::kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("S=1.000000"), std::string::npos) << out_.str();

  ASSERT_EQ(run({"search", path("query.json"), path("enc.db"), "--ckpt", path("model.ckpt"),
                 "--threshold", "0", "--top-k", "5", "--out", path("hits.jsonl")}),
            cli::kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("records: 24 hits: 5"), std::string::npos) << out_.str();

  ASSERT_EQ(run({"eval", path("test.jsonl"), "--ckpt", path("model.ckpt"), "--baselines",
                 "--roc-out", path("roc.csv")}),
            cli::kExitOk)
      << err_.str();
  for (const char* key : {"AUC (calibrated F): ", "AUC (uncalibrated M): ", "Youden threshold: ",
                          "AUC (Diaphora prime product): ", "AUC (tree edit similarity): "}) {
    EXPECT_NE(out_.str().find(key), std::string::npos) << key;
  }
  std::ifstream roc(path("roc.csv"));
  std::string header;
  std::getline(roc, header);
  EXPECT_EQ(header, "threshold,fpr,tpr");
}

TEST_F(CliTest, MiniSourceDirectory) {
  fs::create_directories(path("src"));
  fs::copy_file(fs::path(ASTSIM_FIXTURE_DIR) / "histsizesetfn.mini", path("src/zsh.mini"));
  ASSERT_EQ(run({"gen-corpus", path("src"), "--out", path("c.jsonl")}), cli::kExitOk) << err_.str();
  EXPECT_NE(out_.str().find("functions: 2"), std::string::npos) << out_.str();
  EXPECT_NE(out_.str().find("asts: 4"), std::string::npos);
}

TEST_F(CliTest, BadMiniNamesFileAndLine) {
  fs::create_directories(path("src"));
  write("src/bad.mini", "fn f() {\n  x = 1\n}\n");
  EXPECT_EQ(run({"gen-corpus", path("src"), "--out", path("c.jsonl")}), cli::kExitUsage);
  EXPECT_NE(err_.str().find("bad.mini:3:"), std::string::npos) << err_.str();
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}), cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}), cli::kExitUsage);
  EXPECT_EQ(run({"train"}), cli::kExitUsage);
  EXPECT_EQ(run({"gen-corpus"}), cli::kExitUsage);
  EXPECT_EQ(run({"train", path("missing.jsonl")}), cli::kExitUsage);
  EXPECT_EQ(run({"--help"}), cli::kExitOk);
  EXPECT_NE(out_.str().find("gen-corpus"), std::string::npos);
}

TEST_F(CliTest, MalformedAstIsSchemaError) {
  write("bad.jsonl", "{\"schema\":\"ast-v1\",\"name\":\"f\"}\n");
  write("ck", "");
  EXPECT_EQ(run({"train", path("bad.jsonl")}), cli::kExitUsage);
  EXPECT_NE(err_.str().find("error:"), std::string::npos);
}

TEST_F(CliTest, CheckpointMismatchReportsBothHashes) {
  ASSERT_EQ(run({"gen-corpus", "--synthetic", "8", "--out", path("c.jsonl")}), cli::kExitOk);
  ASSERT_EQ(run({"train", path("c.jsonl"), "--epochs", "1", "--d-e", "4", "--hidden", "4",
                 "--out", path("a.ckpt")}),
            cli::kExitOk)
      << err_.str();
  ASSERT_EQ(run({"train", path("c.jsonl"), "--epochs", "1", "--d-e", "4", "--hidden", "4",
                 "--seed", "1", "--out", path("b.ckpt")}),
            cli::kExitOk);
  ASSERT_EQ(run({"encode", path("c.jsonl"), "--ckpt", path("a.ckpt"), "--out", path("e.db")}),
            cli::kExitOk);
  const std::string hash_a = params_hash(load_checkpoint_file(path("a.ckpt")).params);
  const std::string hash_b = params_hash(load_checkpoint_file(path("b.ckpt")).params);
  ASSERT_NE(hash_a, hash_b);
  {
    std::ifstream corpus(path("c.jsonl"));
    std::string first;
    std::getline(corpus, first);
    write("q.json", first + "\n");
  }
  EXPECT_EQ(run({"search", path("q.json"), path("e.db"), "--ckpt", path("b.ckpt")}),
            cli::kExitRuntime);
  EXPECT_NE(err_.str().find(hash_a), std::string::npos) << err_.str();
  EXPECT_NE(err_.str().find(hash_b), std::string::npos);
  EXPECT_EQ(run({"encode", path("c.jsonl"), "--ckpt", path("b.ckpt"), "--out", path("e.db"),
                 "--append"}),
            cli::kExitRuntime);
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  write("run.cfg", "seed = 7\nnegatives = 2\n");
  ASSERT_EQ(run({"gen-corpus", "--synthetic", "4", "--config", path("run.cfg"), "--negatives", "1",
                 "--out", path("c.jsonl")}),
            cli::kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("seed=7"), std::string::npos) << out_.str();
  EXPECT_NE(out_.str().find("negatives=1"), std::string::npos);
  write("bad.cfg", "no_such_key = 1\n");
  EXPECT_EQ(run({"gen-corpus", "--synthetic", "4", "--config", path("bad.cfg")}), cli::kExitUsage);
}

TEST_F(CliTest, ExecutableExitCodes) {
  const std::string exe = ASTSIM_CLI_PATH;
  EXPECT_EQ(std::system((exe + " --help > /dev/null").c_str()), 0);
  int status = std::system((exe + " nonsense > /dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(status), cli::kExitUsage);
}

}  // namespace
}  // namespace astsim
