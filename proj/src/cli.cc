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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cotrain/cotrain.h"
#include "cotrain/guideline.h"
#include "cotrain/io.h"
#include "cotrain/metrics.h"
#include "cotrain/oracle.h"
#include "cotrain/sampler.h"
#include "cotrain/sweep.h"
#include "cotrain/toylab.h"

namespace cotrain {
namespace {

namespace fs = std::filesystem;

std::vector<double> ParseList(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      while (pos < item.size() && item[pos] == ' ') ++pos;
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string(flag) + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError(std::string(flag) + ": empty list");
  return out;
}

// Writes to `path`, or to `out` when the path is empty or "-".
void Emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    WriteTextFile(path, text);
  }
}

fs::path MetaPath(const fs::path& data) { return fs::path(data.string() + ".meta.json"); }

int DefaultJobs() {
  if (const char* env = std::getenv("COTRAIN_LAB_JOBS")) {
    try {
      const int jobs = std::stoi(env);
      if (jobs >= 1) return jobs;
    } catch (const std::exception&) {
    }
    throw ConfigError("COTRAIN_LAB_JOBS must be a positive integer, got '" + std::string(env) + "'");
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// ---------------------------------------------------------------------------

struct GenDataArgs {
  double delta_z = 1.0;
  int n_source = 3000;
  int n_target = 30;
  double obs_noise = 0.01;
  uint64_t seed = 0;
  std::string out;
};

void RunGenData(const GenDataArgs& a, std::ostream& err) {
  ManifoldSpec spec;
  spec.delta_z = a.delta_z;
  spec.n_source = a.n_source;
  spec.n_target = a.n_target;
  spec.obs_noise = a.obs_noise;
  const ToyData toy = GenManifoldData(spec, a.seed);
  std::ostringstream jsonl;
  WriteDatasetJsonl(jsonl, toy.data);
  WriteTextFile(a.out, jsonl.str());
  WriteJsonFile(MetaPath(a.out), {{"manifold", ManifoldSpecToJson(spec)}, {"seed", a.seed}});
  err << "wrote " << toy.data.size() << " records to " << a.out << "\n";
}

struct OracleArgs {
  std::string data;
  double w = 0.5;
  std::string kernel = "uniform";
  std::optional<double> bandwidth;
  std::string obs;
  std::string mode = "ode";
  int steps = 50;
  int n = 256;
  uint64_t seed = 0;
  std::string out;
};

void RunOracleSample(const OracleArgs& a, std::ostream& out) {
  LabeledDataset data = ReadDatasetJsonl(fs::path(a.data));
  const Eigen::Index d_act = data.d_act();
  const KernelKind kernel = ParseKernel(a.kernel);
  std::optional<Vector> z;
  if (kernel == KernelKind::kGaussianRbf) {
    if (!a.obs.empty()) {
      const std::vector<double> v = ParseList(a.obs, "--obs");
      z = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    } else {
      const std::vector<size_t> target = data.Indices(Domain::kTarget);
      z = data[target.empty() ? 0 : target.front()].obs;
    }
    if (z->size() != data.d_obs()) {
      throw ConfigError("--obs has " + std::to_string(z->size()) + " entries, data observations have " +
                        std::to_string(data.d_obs()));
    }
  } else if (!a.obs.empty()) {
    throw ConfigError("--obs needs --kernel rbf");
  }
  const MixtureOracle oracle(std::move(data), a.w, NoiseSchedule{}, kernel, a.bandwidth);
  SamplerConfig cfg;
  cfg.mode = ParseSamplerMode(a.mode);
  cfg.n_steps = a.steps;
  cfg.seed = a.seed;
  if (a.n < 1 || a.steps < 1) throw ConfigError("--n and --steps must be positive");
  const Matrix samples = Sample(OracleScore(oracle, z), NoiseSchedule{}, cfg, d_act, a.n);
  Emit(a.out, SamplesToCsv(samples), out);
}

struct ReweightArgs {
  long n = 0;
  long m = 0;
  double r_gap = 0.0;
  double d = 2.0;
  double t = 0.5;
  std::string w_grid;
  std::string out;
};

void RunReweight(const ReweightArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<double> grid;
  if (a.w_grid.empty()) {
    for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
  } else {
    grid = ParseList(a.w_grid, "--w-grid");
  }
  const std::vector<ReweightRow> rows = ReweightCurve(a.n, a.m, grid, a.r_gap, a.d);
  std::string csv = "w,g_r,g_s,ratio,t\n";
  for (const ReweightRow& r : rows) {
    csv += FormatDouble(r.w) + "," + FormatDouble(r.g_r) + "," + FormatDouble(r.g_s) + "," +
           FormatDouble(r.ratio) + "," + FormatDouble(a.t) + "\n";
  }
  Emit(a.out, csv, out);
  err << "intersection with g = 1 - w at w = " << FormatDouble(DiagonalIntersection(a.n, a.m, a.r_gap, a.d))
      << "\n";
}

struct TrainArgs {
  std::string config;
  std::string data;
  std::string out_dir;
  std::optional<std::string> method;
  std::optional<double> w;
  std::optional<int> steps;
  std::optional<uint64_t> seed;
  std::optional<double> lambda_disc;
  std::optional<double> lambda_ot;
  std::optional<double> p_drop;
  std::optional<int> warmup;
  std::optional<std::string> disc_direction;
  std::optional<double> grl_strength;
  std::optional<int> hidden;
  std::optional<int> batch;
  std::optional<double> lr;
  bool no_timing = false;
};

void RunTrain(const TrainArgs& a, std::ostream& err) {
  RunConfig rc;
  bool warmup_given = a.warmup.has_value();
  if (!a.config.empty()) {
    const nlohmann::json doc = ReadJsonFile(a.config);
    rc = RunConfigFromJson(doc);
    warmup_given = warmup_given || (doc.contains("train") && doc["train"].contains("warmup"));
  } else {
    rc.has_manifold = false;
  }
  if (!a.data.empty()) rc.data = a.data;
  if (rc.data.empty()) throw ConfigError("train needs --data (or 'data' in --config)");
  TrainConfig& t = rc.train;
  if (a.method) t.method = ParseMethod(*a.method);
  if (a.w) t.w = *a.w;
  if (a.steps) t.steps = *a.steps;
  if (a.seed) t.seed = *a.seed;
  if (a.lambda_disc) t.lambda_disc = *a.lambda_disc;
  if (a.lambda_ot) t.lambda_ot = *a.lambda_ot;
  if (a.p_drop) t.p_drop = *a.p_drop;
  if (a.warmup) t.warmup = *a.warmup;
  if (a.disc_direction) t.disc_direction = ParseDiscDirection(*a.disc_direction);
  if (a.grl_strength) t.grl_strength = *a.grl_strength;
  if (a.hidden) t.hidden = *a.hidden;
  if (a.batch) t.batch = *a.batch;
  if (a.lr) t.lr = *a.lr;
  // Short runs keep the default warmup from exceeding the run length.
  if (!warmup_given && t.warmup > t.steps) t.warmup = t.steps;
  t.Validate();

  const fs::path meta = MetaPath(rc.data);
  if (fs::exists(meta)) {
    const nlohmann::json doc = ReadJsonFile(meta);
    if (!doc.contains("manifold")) throw ParseError(meta.string() + ": missing 'manifold'");
    rc.manifold = ManifoldSpecFromJson(doc["manifold"]);
    rc.has_manifold = true;
  }
  const LabeledDataset data = ReadDatasetJsonl(fs::path(rc.data));
  TrainResult result = Train(data, t);
  const double wall = result.report.wall_seconds;
  if (a.no_timing) result.report.wall_seconds = 0.0;
  WriteRunDirectory(a.out_dir, RunConfigToJson(rc), result);
  const LossRecord& f = result.report.final_losses;
  err << "trained " << MethodName(t.method) << " for " << t.steps << " steps in "
      << wall << " s; final dsm " << f.dsm << "\n";
}

struct EvalArgs {
  std::string run;
  std::string region = "in-dist";
  std::optional<double> guidance_lambda;
  std::optional<uint64_t> seed;
  std::optional<int> n_eval;
  std::string out;
};

void RunEval(const EvalArgs& a, std::ostream& out) {
  const fs::path dir(a.run);
  const RunConfig rc = RunConfigFromJson(ReadJsonFile(dir / "config.json"));
  if (!rc.has_manifold) {
    throw ConfigError("eval needs ground truth: the run's data was not produced by gen-data");
  }
  const TrainedModel model = TrainedModelFromJson(ReadJsonFile(dir / "checkpoint.json"));
  const EvalRegion region = ParseEvalRegion(a.region);
  const uint64_t seed = a.seed.value_or(rc.train.seed);
  const int n_eval = a.n_eval.value_or(rc.eval.n_eval);
  PredictorOptions opts;
  opts.sampler = rc.sampler;
  opts.sampler.seed = seed;
  opts.n_draws = rc.eval.n_draws;
  opts.guidance_lambda = a.guidance_lambda;
  const double l2 = EvalL2(ModelPredictor(model, opts), rc.manifold, region, n_eval, seed);
  nlohmann::json doc = {{"region", EvalRegionName(region)},
                        {"l2", l2},
                        {"n_eval", n_eval},
                        {"n_draws", opts.n_draws},
                        {"seed", seed},
                        {"method", MethodName(rc.train.method)}};
  doc["guidance_lambda"] = a.guidance_lambda ? nlohmann::json(*a.guidance_lambda) : nlohmann::json(nullptr);
  Emit(a.out, doc.dump(2) + "\n", out);
}

struct SweepArgs {
  std::string config;
  std::optional<int> jobs;
  std::string out;
  std::string anova_out;
};

void RunSweepCommand(const SweepArgs& a, std::ostream& err) {
  const RunConfig rc = RunConfigFromJson(ReadJsonFile(a.config));
  const int jobs = a.jobs.value_or(DefaultJobs());
  if (jobs < 1) throw ConfigError("--jobs must be positive");
  const SweepResult result = RunSweep(rc, jobs, [&err](const SweepRow& r, size_t done, size_t total) {
    err << "[" << done << "/" << total << "] " << r.method << " w=" << r.w << " dz=" << r.delta_z
        << " seed=" << r.seed << " l2=" << r.eval.l2_in_dist << (r.error.empty() ? "" : " error: " + r.error)
        << "\n";
  });
  WriteTextFile(a.out, SweepResultToCsv(result));
  fs::path anova = a.anova_out.empty() ? fs::path(a.out).replace_extension(".anova.json") : fs::path(a.anova_out);
  WriteJsonFile(anova, SweepAnova(result));
  size_t failed = 0;
  for (const SweepRow& r : result.rows) failed += r.error.empty() ? 0 : 1;
  err << "wrote " << result.rows.size() << " rows (" << failed << " failed) to " << a.out << "\n";
}

struct MetricsArgs {
  std::string features_a;
  std::string features_b;
  std::string metric = "all";
  uint64_t seed = 0;
  double t = 0.5;
  std::string out;
};

inline constexpr Eigen::Index kGromovMaxPoints = 300;

void RunMetrics(const MetricsArgs& a, std::ostream& out) {
  const Matrix fa = ReadFeatureCsv(a.features_a);
  const Matrix fb = ReadFeatureCsv(a.features_b);
  if (fa.rows() != fb.rows()) {
    throw ShapeError("feature files differ in dimension: " + std::to_string(fa.rows()) + " vs " +
                     std::to_string(fb.rows()));
  }
  const bool all = a.metric == "all";
  if (!all && a.metric != "w2" && a.metric != "gw" && a.metric != "probe" && a.metric != "bc") {
    throw ConfigError("unknown --metric '" + a.metric + "' (expected w2, gw, probe, bc or all)");
  }
  MetricsReport report;
  if (all || a.metric == "w2") report.w_distance = Wasserstein(fa, fb);
  if (all || a.metric == "gw") {
    report.gw_distance = GromovWasserstein(Subsample(fa, kGromovMaxPoints, a.seed),
                                           Subsample(fb, kGromovMaxPoints, a.seed + 1))
                             .value;
  }
  if (all || a.metric == "probe") {
    Matrix pooled(fa.rows(), fa.cols() + fb.cols());
    pooled << fa, fb;
    std::vector<int> labels(static_cast<size_t>(fa.cols()), 0);
    labels.resize(static_cast<size_t>(pooled.cols()), 1);
    report.probe_accuracy = LinearProbe(pooled, labels, a.seed);
  }
  if (all || a.metric == "bc") {
    // Features are treated as observations with a shared dummy action, so
    // the overlap is measured on feature distances alone.
    std::vector<Record> records;
    for (Eigen::Index j = 0; j < fa.cols(); ++j) records.push_back({fa.col(j), Vector::Zero(1), Domain::kTarget});
    for (Eigen::Index j = 0; j < fb.cols(); ++j) records.push_back({fb.col(j), Vector::Zero(1), Domain::kSource});
    report.bhattacharyya = BhattacharyyaOverlap(LabeledDataset(std::move(records)), a.t, NoiseSchedule{});
  }
  Emit(a.out, MetricsReportToJson(report).dump(2) + "\n", out);
}

struct GuidelineArgs {
  long n_target = 0;
  long m_source = 0;
  double q = 0.8;
  std::string gap = "small";
  bool cap_half = false;
};

void RunGuideline(const GuidelineArgs& a, std::ostream& out) {
  GuidelineInput in;
  in.n_target = a.n_target;
  in.m_source = a.m_source;
  in.q = a.q;
  in.gap = ParseGapSize(a.gap);
  in.cap_half = a.cap_half;
  out << MixingRangeToJson(RecommendRange(in)).dump(2) << "\n";
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Co-training diffusion policy laboratory"};
  app.name("cotrain-lab");
  app.require_subcommand(1);

  GenDataArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "Generate the synthetic two-manifold dataset (JSONL)");
  gen_cmd->add_option("--delta-z", gen.delta_z, "Target offset along the third input axis")->capture_default_str();
  gen_cmd->add_option("--n-source", gen.n_source)->capture_default_str();
  gen_cmd->add_option("--n-target", gen.n_target)->capture_default_str();
  gen_cmd->add_option("--obs-noise", gen.obs_noise)->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output JSONL path")->required();

  OracleArgs orc;
  CLI::App* orc_cmd = app.add_subcommand("oracle-sample", "Sample with the closed-form mixture score (CSV)");
  orc_cmd->add_option("--data", orc.data)->required();
  orc_cmd->add_option("--w", orc.w)->capture_default_str();
  orc_cmd->add_option("--kernel", orc.kernel, "uniform or rbf")->capture_default_str();
  orc_cmd->add_option("--bandwidth", orc.bandwidth, "RBF bandwidth (default: median heuristic)");
  orc_cmd->add_option("--obs", orc.obs, "Comma-separated observation to condition on (rbf only)");
  orc_cmd->add_option("--mode", orc.mode, "ode or sde")->capture_default_str();
  orc_cmd->add_option("--steps", orc.steps)->capture_default_str();
  orc_cmd->add_option("--n", orc.n)->capture_default_str();
  orc_cmd->add_option("--seed", orc.seed)->capture_default_str();
  orc_cmd->add_option("--out", orc.out, "Output CSV (default stdout)");

  ReweightArgs rw;
  CLI::App* rw_cmd = app.add_subcommand("reweight", "Tabulate the domain reweighting curve (CSV)");
  rw_cmd->add_option("--n", rw.n, "Target dataset size N")->required();
  rw_cmd->add_option("--m", rw.m, "Source dataset size M")->required();
  rw_cmd->add_option("--r-gap", rw.r_gap, "r_s^2 - r_t^2 in normalized shell radii")->capture_default_str();
  rw_cmd->add_option("--d", rw.d, "Action dimension")->capture_default_str();
  rw_cmd->add_option("--t", rw.t, "Diffusion time (recorded in the table)")->capture_default_str();
  rw_cmd->add_option("--w-grid", rw.w_grid, "Comma-separated w values (default 0, 0.01, ..., 1)");
  rw_cmd->add_option("--out", rw.out, "Output CSV (default stdout)");

  TrainArgs tr;
  CLI::App* tr_cmd = app.add_subcommand("train", "Train a denoiser and write a run directory");
  tr_cmd->add_option("--config", tr.config, "Run config JSON; flags override it");
  tr_cmd->add_option("--data", tr.data, "Dataset JSONL");
  tr_cmd->add_option("--out-dir", tr.out_dir)->required();
  tr_cmd->add_option("--method", tr.method, "vanilla, ot, adda, cfg or cfg-adda");
  tr_cmd->add_option("--w", tr.w, "Mixing ratio");
  tr_cmd->add_option("--steps", tr.steps);
  tr_cmd->add_option("--seed", tr.seed);
  tr_cmd->add_option("--lambda-disc", tr.lambda_disc);
  tr_cmd->add_option("--lambda-ot", tr.lambda_ot);
  tr_cmd->add_option("--p-drop", tr.p_drop);
  tr_cmd->add_option("--warmup", tr.warmup);
  tr_cmd->add_option("--disc-direction", tr.disc_direction, "reverse or promote");
  tr_cmd->add_option("--grl-strength", tr.grl_strength);
  tr_cmd->add_option("--hidden", tr.hidden, "Denoiser width");
  tr_cmd->add_option("--batch", tr.batch);
  tr_cmd->add_option("--lr", tr.lr);
  tr_cmd->add_flag("--no-timing", tr.no_timing, "Write wall_seconds = 0 so reruns are byte-identical");

  EvalArgs ev;
  CLI::App* ev_cmd = app.add_subcommand("eval", "Evaluate a trained run against the toy ground truth (JSON)");
  ev_cmd->add_option("--run", ev.run, "Run directory written by train")->required();
  ev_cmd->add_option("--region", ev.region, "in-dist or ood")->capture_default_str();
  ev_cmd->add_option("--guidance-lambda", ev.guidance_lambda, "Classifier-free guidance strength");
  ev_cmd->add_option("--seed", ev.seed, "Evaluation seed (default: the run's seed)");
  ev_cmd->add_option("--n-eval", ev.n_eval);
  ev_cmd->add_option("--out", ev.out, "Output JSON (default stdout)");

  SweepArgs sw;
  CLI::App* sw_cmd = app.add_subcommand("sweep", "Run the (w x delta_z) sweep (CSV + ANOVA JSON)");
  sw_cmd->add_option("--config", sw.config)->required();
  sw_cmd->add_option("--jobs", sw.jobs, "Worker threads (default: COTRAIN_LAB_JOBS or all cores)");
  sw_cmd->add_option("--out", sw.out, "Output CSV")->required();
  sw_cmd->add_option("--anova-out", sw.anova_out, "ANOVA JSON (default: <out>.anova.json)");

  MetricsArgs mt;
  CLI::App* mt_cmd = app.add_subcommand("metrics", "Compare two feature sets (JSON)");
  mt_cmd->add_option("--features-a", mt.features_a)->required();
  mt_cmd->add_option("--features-b", mt.features_b)->required();
  mt_cmd->add_option("--metric", mt.metric, "w2, gw, probe, bc or all")->capture_default_str();
  mt_cmd->add_option("--seed", mt.seed)->capture_default_str();
  mt_cmd->add_option("--t", mt.t, "Noise level for bc")->capture_default_str();
  mt_cmd->add_option("--out", mt.out, "Output JSON (default stdout)");

  GuidelineArgs gl;
  CLI::App* gl_cmd = app.add_subcommand("guideline", "Recommend a mixing-ratio range (JSON)");
  gl_cmd->add_option("--n-target", gl.n_target)->required();
  gl_cmd->add_option("--m-source", gl.m_source)->required();
  gl_cmd->add_option("--q", gl.q)->capture_default_str();
  gl_cmd->add_option("--gap", gl.gap, "small or large")->capture_default_str();
  gl_cmd->add_flag("--cap-half", gl.cap_half, "Cap the upper bound at 0.5");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) RunGenData(gen, err);
    if (orc_cmd->parsed()) RunOracleSample(orc, out);
    if (rw_cmd->parsed()) RunReweight(rw, out, err);
    if (tr_cmd->parsed()) RunTrain(tr, err);
    if (ev_cmd->parsed()) RunEval(ev, out);
    if (sw_cmd->parsed()) RunSweepCommand(sw, err);
    if (mt_cmd->parsed()) RunMetrics(mt, out);
    if (gl_cmd->parsed()) RunGuideline(gl, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace cotrain
