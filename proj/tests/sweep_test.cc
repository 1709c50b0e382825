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

#include "cotrain/sweep.h"

#include <cmath>
#include <limits>
#include <string>

#include <gtest/gtest.h>

namespace cotrain {
namespace {

RunConfig SmallConfig() {
  RunConfig c;
  c.train.steps = 150;
  c.train.batch = 32;
  c.train.hidden = 16;
  c.train.disc_hidden = 8;
  c.train.warmup = 50;
  c.train.log_every = 50;
  c.manifold.n_source = 120;
  c.manifold.n_target = 12;
  c.sampler.n_steps = 8;
  c.eval.n_eval = 24;
  c.eval.n_draws = 2;
  c.eval.n_probe = 20;
  c.sweep.w = {0.5};
  c.sweep.delta_z = {1.0};
  c.sweep.replicates = 1;
  c.sweep.timing = false;
  return c;
}

TEST(RunConfigTest, JsonRoundTrip) {
  RunConfig c = SmallConfig();
  c.data = "data.jsonl";
  c.train.method = Method::kCfgAdda;
  c.sweep.variants = {{{"method", "ot"}}};
  const nlohmann::json doc = RunConfigToJson(c);
  EXPECT_EQ(doc["version"], kRunConfigVersion);
  EXPECT_EQ(RunConfigToJson(RunConfigFromJson(doc)), doc);

  c.has_manifold = false;
  EXPECT_FALSE(RunConfigToJson(c).contains("manifold"));
  EXPECT_FALSE(RunConfigFromJson(RunConfigToJson(c)).has_manifold);
}

TEST(RunConfigTest, RejectsBadDocuments) {
  nlohmann::json doc = RunConfigToJson(SmallConfig());
  nlohmann::json v = doc;
  v.erase("version");
  EXPECT_THROW(RunConfigFromJson(v), ConfigError);
  v["version"] = 2;
  EXPECT_THROW(RunConfigFromJson(v), ConfigError);
  v = doc;
  v["extra"] = 1;
  EXPECT_THROW(RunConfigFromJson(v), ConfigError);
  v = doc;
  v["sweep"]["w"] = {1.5};
  EXPECT_THROW(RunConfigFromJson(v), ConfigError);
  v = doc;
  v["sweep"]["replicates"] = 0;
  EXPECT_THROW(RunConfigFromJson(v), ConfigError);
  v = doc;
  v["sweep"]["variants"] = {{{"method", "nope"}}};
  EXPECT_THROW(RunConfigFromJson(v), ConfigError);
  v = doc;
  v["eval"]["sra_t"] = 1.0;
  EXPECT_THROW(RunConfigFromJson(v), ConfigError);
  v = doc;
  v["sampler"]["mode"] = "rk4";
  EXPECT_THROW(RunConfigFromJson(v), ConfigError);
}

TEST(VariantTest, OverridesAndLabels) {
  TrainConfig base;
  const TrainConfig t = ApplyVariant(base, {{"method", "adda"}, {"disc_direction", "promote"}});
  EXPECT_EQ(t.method, Method::kAdda);
  EXPECT_EQ(t.steps, base.steps);
  EXPECT_EQ(VariantLabel(t), "adda-promote");
  EXPECT_EQ(VariantLabel(ApplyVariant(base, {{"method", "cfg-adda"}})), "cfg-adda");
  // The direction only matters for discriminator methods.
  EXPECT_EQ(VariantLabel(ApplyVariant(base, {{"method", "ot"}, {"disc_direction", "promote"}})), "ot");
  EXPECT_THROW(ApplyVariant(base, nlohmann::json::array()), ConfigError);
  EXPECT_THROW(ApplyVariant(base, {{"bogus", 1}}), ConfigError);
}

TEST(SweepCsvTest, RoundTripKeepsNanAndErrors) {
  SweepResult r;
  SweepRow a;
  a.w = 0.1;
  a.delta_z = 3.0;
  a.seed = 7;
  a.method = "vanilla";
  a.eval = {1.0 / 3.0, 2e-5, {0.25, 0.125, 0.5}};
  a.wall_s = 1.5;
  SweepRow b = a;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  b.eval = {nan, nan, {nan, nan, nan}};
  b.error = "step 3: loss, exploded\nbadly";
  r.rows = {a, b};
  const std::string csv = SweepResultToCsv(r);
  const SweepResult back = SweepResultFromCsv(csv);
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[0].eval.l2_in_dist, a.eval.l2_in_dist);
  EXPECT_EQ(back.rows[0].seed, 7u);
  EXPECT_TRUE(std::isnan(back.rows[1].eval.sra.probe_acc));
  EXPECT_EQ(back.rows[1].error, "step 3: loss; exploded;badly");
  EXPECT_EQ(SweepResultToCsv(back), csv);

  EXPECT_THROW(SweepResultFromCsv("a,b\n"), ParseError);
  EXPECT_THROW(SweepResultFromCsv(csv + "1,2,3\n"), ParseError);
}

TEST(SweepAnovaTest, SharesAndFailedRuns) {
  SweepResult r;
  for (double w : {0.1, 0.5}) {
    for (double dz : {0.0, 1.0, 3.0}) {
      for (uint64_t s = 0; s < 2; ++s) {
        SweepRow row;
        row.w = w;
        row.delta_z = dz;
        row.seed = s;
        row.method = "vanilla";
        row.eval.l2_in_dist = 10.0 * w + 0.01 * static_cast<double>(s);
        r.rows.push_back(row);
      }
    }
  }
  nlohmann::json doc = SweepAnova(r);
  ASSERT_EQ(doc.size(), 1u);
  const auto& shares = doc[0]["shares"];
  EXPECT_GT(shares["w"].get<double>(), 0.99);
  EXPECT_NEAR(shares["w"].get<double>() + shares["delta_z"].get<double>() + shares["interaction"].get<double>() +
                  shares["residual"].get<double>(),
              1.0, 1e-12);

  r.rows[3].error = "boom";
  doc = SweepAnova(r);
  EXPECT_TRUE(doc[0].contains("error"));
  EXPECT_FALSE(doc[0].contains("shares"));
}

TEST(SweepTest, CellMatchesStandaloneTrainAndEval) {
  const RunConfig c = SmallConfig();
  const SweepResult sweep = RunSweep(c, 1);
  ASSERT_EQ(sweep.rows.size(), 1u);
  const SweepRow& row = sweep.rows[0];
  ASSERT_TRUE(row.error.empty()) << row.error;
  EXPECT_EQ(row.wall_s, 0.0);

  ManifoldSpec spec = c.manifold;
  spec.delta_z = 1.0;
  TrainConfig t = c.train;
  t.w = 0.5;
  t.seed = 0;
  const TrainResult trained = Train(GenManifoldData(spec, 0).data, t);
  const ToyEvaluation e = EvaluateToyModel(trained.model, spec, c.eval, c.sampler, 0);
  EXPECT_EQ(row.eval.l2_in_dist, e.l2_in_dist);
  EXPECT_EQ(row.eval.l2_ood, e.l2_ood);
  EXPECT_EQ(row.eval.sra.m_align, e.sra.m_align);
  EXPECT_EQ(row.eval.sra.d_disc, e.sra.d_disc);
  EXPECT_EQ(row.eval.sra.probe_acc, e.sra.probe_acc);
}

TEST(SweepTest, OrderSeedsAndParallelDeterminism) {
  RunConfig c = SmallConfig();
  c.train.steps = 60;
  c.sweep.w = {0.0, 1.0};
  c.sweep.delta_z = {0.0, 3.0};
  c.sweep.replicates = 2;
  c.sweep.base_seed = 5;
  c.sweep.variants = {{{"method", "vanilla"}}, {{"method", "adda"}}};
  size_t calls = 0;
  const SweepResult serial = RunSweep(c, 1, [&](const SweepRow&, size_t done, size_t total) {
    ++calls;
    EXPECT_EQ(done, calls);
    EXPECT_EQ(total, 16u);
  });
  ASSERT_EQ(serial.rows.size(), 16u);
  EXPECT_EQ(calls, 16u);
  EXPECT_EQ(serial.rows[0].method, "vanilla");
  EXPECT_EQ(serial.rows[8].method, "adda");
  EXPECT_EQ(serial.rows[1].seed, 6u);
  EXPECT_EQ(serial.rows[2].w, 1.0);
  EXPECT_EQ(serial.rows[4].delta_z, 3.0);
  for (const SweepRow& r : serial.rows) {
    EXPECT_TRUE(r.error.empty()) << r.error;  // w endpoints train on one domain
    EXPECT_TRUE(std::isfinite(r.eval.l2_in_dist));
  }
  const SweepResult parallel = RunSweep(c, 3);
  EXPECT_EQ(SweepResultToCsv(parallel), SweepResultToCsv(serial));
}

TEST(SweepTest, ErrorsAreRecordedNotThrown) {
  RunConfig c = SmallConfig();
  c.train.lr = 1e4;
  c.train.steps = 300;
  const SweepResult r = RunSweep(c, 1);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_NE(r.rows[0].error.find("step"), std::string::npos);
  EXPECT_TRUE(std::isnan(r.rows[0].eval.l2_in_dist));
}

// Training on the target alone must beat
// training on the source alone in the target's region: the source outputs
// are offset by the action gap, so w = 0 cannot do better than |gap|^2.
TEST(SweepTest, TargetOnlyBeatsSourceOnly) {
  RunConfig c = SmallConfig();
  c.train.steps = 5000;
  c.train.hidden = 32;
  c.train.batch = 64;
  c.eval.n_eval = 64;
  c.eval.n_draws = 8;
  c.sampler.n_steps = 30;
  c.sweep.w = {0.0, 1.0};
  c.sweep.delta_z = {1.0};
  const SweepResult r = RunSweep(c, 1);
  ASSERT_EQ(r.rows.size(), 2u);
  const double gap_sq = c.manifold.action_gap.squaredNorm();
  EXPECT_GT(r.rows[0].eval.l2_in_dist, 0.5 * gap_sq);
  EXPECT_LT(r.rows[1].eval.l2_in_dist, 0.5 * gap_sq);
}

}  // namespace
}  // namespace cotrain
