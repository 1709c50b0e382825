// Copyright 2026 The Cotrain Lab Authors
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

#include "cotrain/cli.h"

#include <algorithm>
#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cotrain/io.h"

namespace cotrain {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult Cli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage = {"cotrain-lab"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cotrain_cli_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string P(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, UsageAndExitCodes) {
  const CliResult help = Cli({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("gen-data"), std::string::npos);
  EXPECT_NE(help.out.find("guideline"), std::string::npos);
  EXPECT_EQ(Cli({"train", "--help"}).code, kExitOk);
  EXPECT_EQ(Cli({}).code, kExitUsage);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Cli({"guideline", "--n-target", "50"}).code, kExitUsage);
  EXPECT_EQ(Cli({"guideline", "--n-target", "x", "--m-source", "3"}).code, kExitUsage);
  const CliResult bad = Cli({"guideline", "--n-target", "0", "--m-source", "3000"});
  EXPECT_EQ(bad.code, kExitUsage);
  EXPECT_NE(bad.err.find("error:"), std::string::npos);
  // Missing files are runtime failures, not usage errors.
  const CliResult missing = Cli({"oracle-sample", "--data", P("nope.jsonl")});
  EXPECT_EQ(missing.code, kExitFailure);
  EXPECT_NE(missing.err.find("nope.jsonl"), std::string::npos);
}

TEST_F(CliTest, Guideline) {
  const CliResult r = Cli({"guideline", "--n-target", "50", "--m-source", "3000"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const nlohmann::json doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc["w_n"].get<double>(), 0.0164, 5e-5);
  EXPECT_NEAR(doc["w_q"].get<double>(), 0.1291, 5e-5);
  EXPECT_EQ(doc["range"].size(), 2u);
  const nlohmann::json large =
      nlohmann::json::parse(Cli({"guideline", "--n-target", "50", "--m-source", "3000", "--gap", "large"}).out);
  EXPECT_NEAR(large["range"][1].get<double>(), 0.19365, 5e-5);
  EXPECT_EQ(Cli({"guideline", "--n-target", "50", "--m-source", "3000", "--gap", "huge"}).code, kExitUsage);
}

TEST_F(CliTest, Reweight) {
  const CliResult r = Cli({"reweight", "--n", "50", "--m", "3000", "--w-grid", "0,0.5,1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "w,g_r,g_s,ratio,t");
  EXPECT_EQ(lines[1].substr(0, 4), "0,0,");
  EXPECT_NE(r.err.find("intersection"), std::string::npos);
  EXPECT_EQ(Cli({"reweight", "--n", "50", "--m", "3000", "--w-grid", "0,abc"}).code, kExitUsage);
  EXPECT_EQ(Cli({"reweight", "--n", "50", "--m", "3000", "--w-grid", "1.5"}).code, kExitUsage);
}

TEST_F(CliTest, GenDataTrainEvalPipeline) {
  const CliResult gen = Cli({"gen-data", "--n-source", "150", "--n-target", "15", "--seed", "4", "--out", P("d.jsonl")});
  ASSERT_EQ(gen.code, kExitOk) << gen.err;
  EXPECT_EQ(ReadDatasetJsonl(fs::path(P("d.jsonl"))).size(), 165u);
  EXPECT_TRUE(fs::exists(P("d.jsonl.meta.json")));
  EXPECT_EQ(ReadTextFile(P("d.jsonl")),
            (Cli({"gen-data", "--n-source", "150", "--n-target", "15", "--seed", "4", "--out", P("e.jsonl")}),
             ReadTextFile(P("e.jsonl"))));

  const std::initializer_list<std::string> train = {"train",   "--data",   P("d.jsonl"), "--out-dir", P("run"),
                                                    "--method", "cfg",     "--steps",    "40",        "--hidden",
                                                    "8",       "--batch",  "16",         "--no-timing"};
  const CliResult tr = Cli(train);
  ASSERT_EQ(tr.code, kExitOk) << tr.err;
  for (const char* f : {"config.json", "checkpoint.json", "losses.csv", "report.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  }
  const std::string checkpoint = ReadTextFile(dir_ / "run" / "checkpoint.json");
  const std::string report = ReadTextFile(dir_ / "run" / "report.json");
  ASSERT_EQ(Cli(train).code, kExitOk);
  EXPECT_EQ(ReadTextFile(dir_ / "run" / "checkpoint.json"), checkpoint);
  EXPECT_EQ(ReadTextFile(dir_ / "run" / "report.json"), report);

  const CliResult ev = Cli({"eval", "--run", P("run"), "--n-eval", "8", "--guidance-lambda", "1.0"});
  ASSERT_EQ(ev.code, kExitOk) << ev.err;
  const nlohmann::json doc = nlohmann::json::parse(ev.out);
  EXPECT_EQ(doc["method"], "cfg");
  EXPECT_EQ(doc["region"], "in-dist");
  EXPECT_GE(doc["l2"].get<double>(), 0.0);
  EXPECT_EQ(Cli({"eval", "--run", P("run"), "--region", "sideways"}).code, kExitUsage);

  EXPECT_EQ(Cli({"train", "--data", P("d.jsonl"), "--out-dir", P("r2"), "--method", "magic"}).code, kExitUsage);
  EXPECT_EQ(Cli({"train", "--out-dir", P("r3")}).code, kExitUsage);
}

TEST_F(CliTest, OracleSample) {
  ASSERT_EQ(Cli({"gen-data", "--n-source", "40", "--n-target", "4", "--out", P("d.jsonl")}).code, kExitOk);
  const CliResult r =
      Cli({"oracle-sample", "--data", P("d.jsonl"), "--n", "5", "--steps", "10", "--out", P("s.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string csv = ReadTextFile(P("s.csv"));
  EXPECT_EQ(csv.substr(0, 6), "a1,a2\n");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  const CliResult rbf = Cli({"oracle-sample", "--data", P("d.jsonl"), "--kernel", "rbf", "--n", "3", "--steps", "5"});
  EXPECT_EQ(rbf.code, kExitOk) << rbf.err;
  EXPECT_EQ(Cli({"oracle-sample", "--data", P("d.jsonl"), "--obs", "1,2,3"}).code, kExitUsage);
  EXPECT_EQ(Cli({"oracle-sample", "--data", P("d.jsonl"), "--kernel", "rbf", "--obs", "1"}).code, kExitUsage);
  EXPECT_EQ(Cli({"oracle-sample", "--data", P("d.jsonl"), "--mode", "heun"}).code, kExitUsage);
}

TEST_F(CliTest, Metrics) {
  // Identical point sets (one with a header); the probe needs 20 per class.
  std::string body;
  for (int i = 0; i < 24; ++i) body += std::to_string(i % 6) + "," + std::to_string(i / 6) + "\n";
  WriteTextFile(P("a.csv"), "f1,f2\n" + body);
  WriteTextFile(P("b.csv"), body);
  const CliResult same = Cli({"metrics", "--features-a", P("a.csv"), "--features-b", P("b.csv")});
  ASSERT_EQ(same.code, kExitOk) << same.err;
  const nlohmann::json doc = nlohmann::json::parse(same.out);
  EXPECT_NEAR(doc["w_distance"].get<double>(), 0.0, 1e-9);
  EXPECT_TRUE(doc.contains("gw_distance"));
  EXPECT_LE(doc["probe_accuracy"].get<double>(), 0.75);
  EXPECT_TRUE(doc.contains("bhattacharyya"));
  const nlohmann::json w2 =
      nlohmann::json::parse(Cli({"metrics", "--features-a", P("a.csv"), "--features-b", P("b.csv"), "--metric", "w2"}).out);
  EXPECT_EQ(w2.size(), 1u);
  EXPECT_EQ(Cli({"metrics", "--features-a", P("a.csv"), "--features-b", P("b.csv"), "--metric", "kl"}).code,
            kExitUsage);
  WriteTextFile(P("c.csv"), "0,0,0\n");
  EXPECT_NE(Cli({"metrics", "--features-a", P("a.csv"), "--features-b", P("c.csv")}).code, kExitOk);
  WriteTextFile(P("few.csv"), "0,0\n1,1\n");
  EXPECT_NE(Cli({"metrics", "--features-a", P("few.csv"), "--features-b", P("b.csv"), "--metric", "probe"}).code,
            kExitOk);
}

TEST_F(CliTest, SweepWritesCsvAndAnova) {
  nlohmann::json cfg = {
      {"version", 1},
      {"train", {{"steps", 30}, {"hidden", 8}, {"batch", 16}, {"warmup", 10}, {"disc_hidden", 4}}},
      {"manifold", {{"n_source", 60}, {"n_target", 6}}},
      {"sampler", {{"n_steps", 4}}},
      {"eval", {{"n_eval", 8}, {"n_draws", 1}, {"n_probe", 20}}},
      {"sweep", {{"w", {0.3, 0.7}}, {"delta_z", {0.0, 2.0}}, {"replicates", 2}, {"timing", false}}}};
  WriteJsonFile(P("cfg.json"), cfg);
  const CliResult r = Cli({"sweep", "--config", P("cfg.json"), "--jobs", "1", "--out", P("s.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string csv = ReadTextFile(P("s.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
  const nlohmann::json anova = ReadJsonFile(P("s.anova.json"));
  ASSERT_EQ(anova.size(), 1u);
  EXPECT_TRUE(anova[0].contains("shares"));
  ASSERT_EQ(Cli({"sweep", "--config", P("cfg.json"), "--jobs", "2", "--out", P("t.csv")}).code, kExitOk);
  EXPECT_EQ(ReadTextFile(P("t.csv")), csv);

  cfg["version"] = 7;
  WriteJsonFile(P("bad.json"), cfg);
  EXPECT_EQ(Cli({"sweep", "--config", P("bad.json"), "--out", P("u.csv")}).code, kExitUsage);
  EXPECT_EQ(Cli({"sweep", "--config", P("cfg.json"), "--jobs", "0", "--out", P("u.csv")}).code, kExitUsage);
}

}  // namespace
}  // namespace cotrain
