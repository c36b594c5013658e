// Copyright 2026 The MergeDSE Authors
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

#include "mergedse/cli/cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "fmt/core.h"
#include "gtest/gtest.h"
#include "mergedse/cost/oracle.h"
#include "mergedse/dse/dse.h"
#include "mergedse/ir/text.h"
#include "test_util.h"

namespace mergedse::cli {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out, err;
};

Run Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = Main(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string Corpus(const std::string& f) {
  return (fs::path(MERGEDSE_CORPUS_DIR) / f).string();
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / fmt::format("mergedse_cli_test_{}", ::getpid());
    fs::create_directories(dir_);
    // A quick LASSO model so the pipeline commands need not train an MLP.
    auto r = Cli({"train", "--kind", "lasso", "--samples", "200", "--seed", "3", "-o",
                  Path("lasso.model")});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string Path(const std::string& name) { return (dir_ / name).string(); }
  static std::string Read(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  static std::string Write(const std::string& name, const std::string& content) {
    std::ofstream(Path(name)) << content;
    return Path(name);
  }

  static fs::path dir_;
};

fs::path CliTest::dir_;

TEST(ConfigParseTest, KeyValueFile) {
  auto c = ParseConfig(
      "# comment\n"
      "budget = 2500   # LUTs\n"
      "latency=500\n"
      "\n"
      "bandwidth = inf\n"
      "mode = FE+Merging\n"
      "seed = 11\n"
      "sw_latency = mul=4, sdiv=30\n");
  EXPECT_EQ(c.area_budget, 2500);
  EXPECT_EQ(c.latency_cycles, 500);
  EXPECT_TRUE(std::isinf(*c.bandwidth_bps));
  EXPECT_EQ(c.mode, "FE+Merging");
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.sw_latency, "mul=4, sdiv=30");
  EXPECT_FALSE(ParseConfig("").area_budget.has_value());
}

TEST(ConfigParseTest, ErrorsNameTheField) {
  auto field = [](const std::string& text) {
    try {
      ParseConfig(text);
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(e.field()), std::string::npos) << e.what();
      return e.field();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(field("budget = -1\n"), "budget");
  EXPECT_EQ(field("latency = -2\n"), "latency");
  EXPECT_EQ(field("bandwidth = 0\n"), "bandwidth");
  EXPECT_EQ(field("clock = fast\n"), "clock");
  EXPECT_EQ(field("mode = turbo\n"), "mode");
  EXPECT_EQ(field("jobs = 0\n"), "jobs");
  EXPECT_EQ(field("merge_depth = 3\n"), "merge_depth");
  EXPECT_EQ(field("hw_latency = warp=1\n"), "hw_latency");
  EXPECT_EQ(field("colour = red\n"), "colour");
  EXPECT_EQ(field("budget 100\n"), "");
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(Cli({}).code, kExitUsage);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Cli({"dse"}).code, kExitUsage);
  EXPECT_EQ(Cli({"dse", Corpus("fig5.ir"), "--no-such-flag"}).code, kExitUsage);
  EXPECT_EQ(Cli({"train", "--kind", "forest"}).code, kExitUsage);
  // Several programs and nowhere to put their reports.
  EXPECT_EQ(Cli({"dse", "--model", Path("lasso.model"), Corpus("fig5.ir"), Corpus("hash.ir")}).code,
            kExitUsage);
}

TEST_F(CliTest, InputErrorsExitTwo) {
  auto neg = Cli({"dse", Corpus("fig5.ir"), "--budget=-5", "--model", Path("lasso.model")});
  EXPECT_EQ(neg.code, kExitInput);
  EXPECT_NE(neg.err.find("budget"), std::string::npos) << neg.err;

  auto cfg = Write("neg.cfg", "latency = 25\nbudget = -100\n");
  auto bad = Cli({"dse", "--config", cfg, Corpus("fig5.ir")});
  EXPECT_EQ(bad.code, kExitInput);
  EXPECT_NE(bad.err.find("budget"), std::string::npos) << bad.err;
  EXPECT_NE(bad.err.find("line 2"), std::string::npos) << bad.err;

  EXPECT_EQ(Cli({"analyze", Path("missing.ir")}).code, kExitInput);
  auto broken = Write("broken.ir", "func @f( -> i64 {\n}\n");
  auto parse = Cli({"analyze", broken});
  EXPECT_EQ(parse.code, kExitInput);
  EXPECT_NE(parse.err.find("broken.ir"), std::string::npos);
  EXPECT_EQ(Cli({"partition", Corpus("fig5.ir"), "--model", Path("lasso.model")}).code,
            kExitInput);  // no budget
  EXPECT_EQ(Cli({"eval", "--model", Path("missing.model")}).code, kExitInput);
  EXPECT_EQ(Cli({"merge", Corpus("vecops.ir"), "vadd", "main"}).code, kExitInput);
  EXPECT_EQ(Cli({"verify", Corpus("vecops.ir"), "vadd"}).code, kExitInput);
}

TEST_F(CliTest, HelpListsEveryFlag) {
  const std::map<std::string, std::vector<std::string>> flags = {
      {"analyze", {"--config", "--clock", "--output"}},
      {"transform", {"--output"}},
      {"merge", {"--name", "--output"}},
      {"train", {"--kind", "--samples", "--data", "--config", "--seed", "--output"}},
      {"eval", {"--samples", "--data", "--config", "--clock", "--model", "--seed", "--output"}},
      {"partition",
       {"--config", "--budget", "--latency", "--bandwidth", "--clock", "--mode", "--model",
        "--seed", "--output"}},
      {"dse",
       {"--config", "--budget", "--latency", "--bandwidth", "--clock", "--mode", "--model",
        "--seed", "--jobs", "--output"}},
      {"sweep",
       {"--config", "--budget", "--latency", "--bandwidth", "--clock", "--mode", "--model",
        "--seed", "--jobs", "--output"}},
      {"verify", {"--trials", "--config", "--seed", "--output"}},
  };
  for (const auto& [cmd, expected] : flags) {
    auto r = Cli({cmd, "--help"});
    EXPECT_EQ(r.code, 0);
    for (const auto& f : expected) EXPECT_NE(r.out.find(f), std::string::npos) << cmd << " " << f;
    // Nothing beyond the documented set (plus help).
    std::size_t listed = 0;
    for (std::size_t at = r.out.find("\n  -"); at != std::string::npos;
         at = r.out.find("\n  -", at + 1)) {
      ++listed;
    }
    EXPECT_EQ(listed, expected.size() + 2) << cmd << "\n" << r.out;
  }
  auto top = Cli({"--help"});
  EXPECT_EQ(top.code, 0);
  for (const char* cmd :
       {"analyze", "transform", "merge", "train", "eval", "partition", "dse", "sweep", "verify"}) {
    EXPECT_NE(top.out.find(cmd), std::string::npos) << cmd;
  }
}

TEST_F(CliTest, AnalyzeAndTransform) {
  auto a = Cli({"analyze", Corpus("vecops.ir"), Corpus("vecops.heap")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("@vadd\t14\t4\t1\t-\t2\t"), std::string::npos) << a.out;
  EXPECT_NE(a.out.find("@vadd\t@vsub"), std::string::npos);

  auto t = Cli({"transform", Corpus("vecops.ir")});
  ASSERT_EQ(t.code, 0) << t.err;
  auto m = ir::ParseModule(t.out);
  EXPECT_TRUE(m.Contains("vadd_loop0"));
}

TEST_F(CliTest, MergeOutputVerifies) {
  auto out = Path("merged.ir");
  auto m = Cli({"merge", Corpus("vecops.ir"), "vadd", "vsub", "-o", out});
  ASSERT_EQ(m.code, 0) << m.err;
  auto v = Cli({"verify", out, "vadd__vsub", "--trials", "50"});
  EXPECT_EQ(v.code, 0) << v.err;
  EXPECT_EQ(v.out.rfind("PASS @vadd__vsub", 0), 0u) << v.out;
  auto v2 = Cli({"verify", Corpus("vecops.ir"), "sum", "sumsq", "--trials", "50"});
  EXPECT_EQ(v2.code, 0) << v2.out;
}

TEST_F(CliTest, VerifyFailsOnABrokenMerge) {
  auto good = Cli({"merge", Corpus("vecops.ir"), "vadd", "vsub"});
  ASSERT_EQ(good.code, 0);
  // Turn the merged body's subtraction into an addition.
  std::string text = good.out;
  auto at = text.find("func @vadd__vsub");
  auto sub = text.find("= sub ", at);
  ASSERT_NE(sub, std::string::npos);
  text.replace(sub, 6, "= add ");
  auto v = Cli({"verify", Write("bad.ir", text), "vadd__vsub", "--trials", "50"});
  EXPECT_EQ(v.code, kExitInput);
  EXPECT_EQ(v.out.rfind("FAIL", 0), 0u) << v.out;
}

TEST_F(CliTest, TrainAndEval) {
  auto e = Cli({"eval", "--model", Path("lasso.model"), "--samples", "100", "--seed", "9"});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("mre "), std::string::npos);
  auto csv = Write("data.csv", cost::DatasetToCsv(cost::GenerateDataset(50, 4)));
  EXPECT_EQ(Cli({"eval", "--model", Path("lasso.model"), "--data", csv}).code, 0);
  auto f = Cli({"eval", "--model", Path("lasso.model"), Corpus("hash.ir"), Corpus("hash.heap")});
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_NE(f.out.find("@main\t"), std::string::npos);
  auto again = Cli({"train", "--kind", "lasso", "--samples", "200", "--seed", "3"});
  EXPECT_EQ(again.out, Read(Path("lasso.model")));
}

TEST_F(CliTest, PartitionOnePoint) {
  auto r = Cli({"partition", Corpus("vecops.ir"), "--model", Path("lasso.model"), "--budget",
                "1e9", "--latency", "0", "--bandwidth", "inf"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("config\tFE\n"), std::string::npos);
  EXPECT_NE(r.out.find("software\t@main\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, MissingBudgetSweepsPresets) {
  auto r = Cli({"sweep", Corpus("fig5.ir"), Corpus("fig5.heap"), "--model", Path("lasso.model")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = std::count(r.out.begin(), r.out.end(), '\n') - 1;
  EXPECT_EQ(rows, static_cast<long>(4 * dse::SweepGrid::Presets().size()));

  auto cfg = Write("point.cfg", "budget = 5000\nlatency = 25\nbandwidth = 4e9\nmode = FE\n");
  auto one = Cli({"dse", "--config", cfg, "--model", Path("lasso.model"), Corpus("fig5.ir")});
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(std::count(one.out.begin(), one.out.end(), '\n'), 2);
  EXPECT_NE(one.out.find("\nFE,5000,25,4000000000,"), std::string::npos) << one.out;

  // Only the budget is missing: the budget axis sweeps, the rest stay fixed.
  auto cfg2 = Write("nobudget.cfg", "latency = 500\nbandwidth = inf\nmode = FLE\n");
  auto part = Cli({"dse", "--config", cfg2, "--model", Path("lasso.model"), Corpus("fig5.ir")});
  ASSERT_EQ(part.code, 0) << part.err;
  EXPECT_EQ(std::count(part.out.begin(), part.out.end(), '\n'),
            1 + static_cast<long>(dse::SweepGrid::Presets().budgets.size()));

  auto lists = Cli({"sweep", Corpus("fig5.ir"), "--model", Path("lasso.model"), "--budget",
                    "100,1000,10000", "--latency", "25", "--bandwidth", "inf", "--mode", "FE"});
  ASSERT_EQ(lists.code, 0) << lists.err;
  EXPECT_EQ(std::count(lists.out.begin(), lists.out.end(), '\n'), 4);
}

TEST_F(CliTest, SameSeedSameBytes) {
  for (const char* tag : {"a", "b"}) {
    auto r = Cli({"dse", "--seed", "7", "--jobs", tag[0] == 'a' ? "1" : "3", "--model",
                  Path("lasso.model"), "-o", Path(std::string("run_") + tag),
                  Corpus("hash.ir"), Corpus("image.ir"), Corpus("image.heap")});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  for (const char* f : {"hash.csv", "hash.json", "image.csv", "image.json"}) {
    std::string a = Read(Path(std::string("run_a/") + f));
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, Read(Path(std::string("run_b/") + f))) << f;
  }
  EXPECT_TRUE(dse::ValidateReportJson(Read(Path("run_a/image.json"))).empty());
}

TEST_F(CliTest, PrefixOutput) {
  auto r = Cli({"dse", "--model", Path("lasso.model"), "--budget", "1e4", "--latency", "25",
                "--bandwidth", "1e9", "-o", Path("single"), Corpus("stencil.ir")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(Path("single.csv")));
  EXPECT_TRUE(fs::exists(Path("single.json")));
  EXPECT_EQ(r.out, "");
}

TEST_F(CliTest, LogLevelFromEnvironment) {
  ::setenv("MERGEDSE_LOG", "loud", 1);
  EXPECT_EQ(Cli({"transform", Corpus("fig5.ir")}).code, kExitUsage);
  ::setenv("MERGEDSE_LOG", "debug", 1);
  EXPECT_EQ(Cli({"transform", Corpus("fig5.ir")}).code, 0);
  ::setenv("MERGEDSE_LOG", "error", 1);
  EXPECT_EQ(Cli({"transform", Corpus("fig5.ir")}).code, 0);
  ::unsetenv("MERGEDSE_LOG");
}

}  // namespace
}  // namespace mergedse::cli
