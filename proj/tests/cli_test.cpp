// Copyright 2026 The Authors.
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
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include "subgrad.hpp"

namespace subgrad {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("subgrad_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Exit status of `subgrad args`, stdout/stderr captured to files.
  int run(const std::string& args, const std::string& env = "") const {
    const std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" SUBGRAD_CLI "' " +
                            args + " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string out() const { return read_file(path("stdout.txt")); }
  std::string err() const { return read_file(path("stderr.txt")); }

  fs::path dir_;
};

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
      if (c == '"') {
        quoted = !quoted;
      } else if (c == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += c;
      }
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

TEST_F(CliTest, GenMaxcutDeterministic) {
  ASSERT_EQ(run("gen-maxcut --m 5 --n 8 --seed 3 --out a.json"), 0);
  const std::string first = read_file(path("a.json"));
  ASSERT_EQ(run("gen-maxcut --m 5 --n 8 --seed 3 --out a.json --threads 3"), 0);
  EXPECT_EQ(read_file(path("a.json")), first);
  const json j = json::parse(first);
  EXPECT_EQ(j["seed"], 3);
  EXPECT_EQ(j["generated_by"]["command"], "gen-maxcut");
  EXPECT_EQ(j["examples"].size(), 5u);
}

TEST_F(CliTest, SeedFromEnvironment) {
  ASSERT_EQ(run("gen-maxcut --m 2 --n 6 --out a.json", "SUBGRAD_SEED=7"), 0);
  EXPECT_EQ(json::parse(read_file(path("a.json")))["seed"], 7);
  ASSERT_EQ(run("gen-maxcut --m 2 --n 6 --seed 7 --out b.json"), 0);
  EXPECT_EQ(read_file(path("a.json")).substr(0, 40), read_file(path("b.json")).substr(0, 40));
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("gen-maxcut --m 2 --bogus 1 --out a.json"), 1);
  EXPECT_EQ(run("gen-maxcut --m 2 --n 40 --out a.json"), 1);
  EXPECT_EQ(err().find('\n'), err().size() - 1);
  EXPECT_EQ(run("train-maxcut --train missing.json --out c.json"), 1);
  write_file(path("bad.json"), "{\"format_version\": 1");
  EXPECT_EQ(run("train-maxcut --train bad.json --out c.json"), 2);
  write_file(path("bad.txt"), "0 1\n2 x\n");
  EXPECT_EQ(run("train-flid --data bad.txt --out-dir d"), 2);
  EXPECT_NE(err().find("bad.txt:2"), std::string::npos);
  EXPECT_EQ(run("enumerate --n 11"), 1);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(CliTest, EnumerateSumsToOne) {
  for (const std::string args : {"--algo dgreedy --fn cut --n 6 --link g4 --t 0.5",
                                 "--algo pgreedy --fn flid --n 6 --k 3 --t 0.7",
                                 "--algo dgreedy --fn toy --n 2 --link g1"}) {
    ASSERT_EQ(run("enumerate --seed 2 " + args), 0) << args;
    double total = 0.0;
    const auto rows = csv_rows(out());
    for (std::size_t i = 1; i < rows.size(); ++i) total += std::stod(rows[i][1]);
    EXPECT_NEAR(total, 1.0, 1e-12) << args;
  }
}

TEST_F(CliTest, ToyEnumerationIsDeterministicOutcome) {
  ASSERT_EQ(run("enumerate --fn toy --n 2 --link g1"), 0);
  const auto rows = csv_rows(out());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(std::stod(rows[i][1]), rows[i][0] == "{1}" ? 1.0 : 0.0);
  }
}

TEST_F(CliTest, MaxcutPipeline) {
  ASSERT_EQ(run("gen-maxcut --m 24 --n 8 --seed 1 --out train.json"), 0);
  ASSERT_EQ(run("gen-maxcut --m 12 --n 8 --seed 2 --out test.json"), 0);
  ASSERT_EQ(run("train-maxcut --train train.json --test test.json --epochs 2 --seed 4 "
                "--out ckpt.json --history hist.csv"),
            0);
  const auto hist = csv_rows(read_file(path("hist.csv")));
  ASSERT_EQ(hist.size(), 3u);
  EXPECT_EQ(hist[0][0], "epoch");
  const std::string ckpt = read_file(path("ckpt.json"));
  ASSERT_EQ(run("train-maxcut --train train.json --test test.json --epochs 2 --seed 4 "
                "--out ckpt.json --history hist.csv --threads 2"),
            0);
  EXPECT_EQ(read_file(path("ckpt.json")), ckpt);
  ASSERT_EQ(run("eval-maxcut --ckpt ckpt.json --test test.json --seed 5 --out eval.csv"), 0);
  const auto eval = csv_rows(read_file(path("eval.csv")));
  ASSERT_EQ(eval.size(), 4u);
  EXPECT_EQ(eval[1][0], "learned");
  EXPECT_EQ(eval[2][0], "original");
  EXPECT_EQ(eval[3][0], "random");
  for (std::size_t i = 1; i < 4; ++i) {
    const double r = std::stod(eval[i][1]);
    EXPECT_GT(r, 0.0);
    EXPECT_LE(r, 1.0);
  }
  EXPECT_EQ(run("eval-maxcut --ckpt ckpt.json --test test.json --baselines bogus"), 1);
}

TEST_F(CliTest, UntrainedCheckpointNearRandomBaseline) {
  ASSERT_EQ(run("gen-maxcut --m 4 --n 10 --seed 1 --out train.json"), 0);
  ASSERT_EQ(run("gen-maxcut --m 40 --n 10 --seed 2 --out test.json"), 0);
  ASSERT_EQ(run("train-maxcut --train train.json --epochs 0 --seed 4 --out ckpt.json"), 0);
  ASSERT_EQ(run("eval-maxcut --ckpt ckpt.json --test test.json --seed 5 --samples 20"), 0);
  const auto eval = csv_rows(out());
  const double learned = std::stod(eval[1][1]);
  const double random = std::stod(eval[3][1]);
  EXPECT_NEAR(learned, random, 0.1);
  EXPECT_LT(learned, std::stod(eval[2][1]));
}

TEST_F(CliTest, FlidPipeline) {
  const FlidFn<double> planted({0.5, 0.2, -0.3, 0.1, 0.4, -0.1},
                               {2, 0, 2, 0, 0, 2, 0, 2, 1, 1, 0, 0}, 2);
  const auto ds = sample_registries(planted, LinkFunction::sigmoid(1.0), ItemOrder::identity(6),
                                    60, 3);
  save_registries(ds, path("regs.txt"));
  ASSERT_EQ(run("train-flid --data regs.txt --folds 3 --fold 0,2 --epochs 2 --seed 1 "
                "--out-dir ck --history hist.csv"),
            0)
      << err();
  EXPECT_TRUE(fs::exists(path("ck/fold0-flid.json")));
  EXPECT_TRUE(fs::exists(path("ck/fold2-modular.json")));
  EXPECT_FALSE(fs::exists(path("ck/fold1-flid.json")));
  ASSERT_EQ(run("eval-flid --ckpts ck --data regs.txt --out eval.csv"), 0) << err();
  const auto rows = csv_rows(read_file(path("eval.csv")));
  ASSERT_EQ(rows.size(), 2u);  // fold 0 only: fold 1 is missing
  EXPECT_EQ(rows[1][0], "0");
  ASSERT_EQ(run("train-flid --data regs.txt --algo pgreedy --folds 3 --fold 1 --epochs 1 "
                "--seed 1 --out-dir pg"),
            0)
      << err();
}

TEST_F(CliTest, VerifyGuarantees) {
  ASSERT_EQ(run("verify-guarantees --theorem 1 --n 6 --runs 10000 --instances 2 --seed 3"), 0);
  const auto rows = csv_rows(out());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].back(), "1");
  EXPECT_EQ(run("verify-guarantees --theorem 3"), 1);
  EXPECT_EQ(run("verify-guarantees --runs 10"), 1);
}

TEST_F(CliTest, SweepTemperature) {
  ASSERT_EQ(run("gen-maxcut --m 10 --n 7 --seed 1 --out train.json"), 0);
  ASSERT_EQ(run("sweep-temperature --train train.json --t-list 2^-1..2^1 --epochs 2 --seed 1"), 0);
  const auto rows = csv_rows(out());
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[1][0], "0.5");
  EXPECT_EQ(rows[6][0], "2");
  EXPECT_EQ(run("sweep-temperature --train train.json --t-list 2^3..2^1"), 1);
  EXPECT_EQ(run("sweep-temperature --train train.json --t-list 0.5,x"), 1);
}

}  // namespace
}  // namespace subgrad
