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

// Acceptance runner: one PASS/FAIL line per criterion. Sweep tables are
// cached in the work directory, keyed by their full config, so reruns only
// pay for the cheap checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "checks.h"
#include "cotrain/cli.h"
#include "cotrain/guideline.h"
#include "cotrain/io.h"
#include "cotrain/metrics.h"
#include "cotrain/sweep.h"
#include "cotrain/toylab.h"

namespace cotrain {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Options {
  fs::path workdir = "acceptance_work";
  int jobs = 1;
  std::set<int> only;
  std::set<int> known_failures;
};

std::string Num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

bool BitEqual(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<size_t>(a.size())) == 0;
}

// ---------------------------------------------------------------------------
// Sweeps.

RunConfig ToyConfig() {
  RunConfig c;
  c.train.steps = 10000;
  c.train.hidden = 64;
  c.sweep.timing = false;
  return c;
}

double NaturalToyRatio() {
  const ManifoldSpec spec;
  return NaturalRatio(spec.n_target, spec.n_source);
}

RunConfig MainSweepConfig() { return ToyConfig(); }

RunConfig MethodSweepConfig() {
  RunConfig c = ToyConfig();
  c.sweep.w = {NaturalToyRatio(), 0.1, 0.3};
  c.sweep.delta_z = {1.0};
  c.sweep.variants = {{{"method", "vanilla"}},
                      {{"method", "cfg-adda"}},
                      {{"method", "adda"}, {"disc_direction", "reverse"}},
                      {{"method", "adda"}, {"disc_direction", "promote"}}};
  return c;
}

SweepResult CachedSweep(const Options& opt, const std::string& name, const RunConfig& config) {
  const fs::path csv = opt.workdir / (name + ".csv");
  const fs::path key = opt.workdir / (name + ".config.json");
  const std::string want = RunConfigToJson(config).dump(2) + "\n";
  if (fs::exists(csv) && fs::exists(key) && ReadTextFile(key) == want) {
    std::cerr << "  [" << name << "] using cached " << csv.string() << "\n";
    return SweepResultFromCsv(ReadTextFile(csv));
  }
  std::cerr << "  [" << name << "] running sweep\n";
  const SweepResult result = RunSweep(config, opt.jobs, [&name](const SweepRow& r, size_t done, size_t total) {
    std::cerr << "  [" << name << " " << done << "/" << total << "] " << r.method << " w=" << r.w
              << " dz=" << r.delta_z << " seed=" << r.seed << " l2=" << r.eval.l2_in_dist
              << (r.error.empty() ? "" : " error: " + r.error) << "\n";
  });
  WriteTextFile(csv, SweepResultToCsv(result));
  WriteJsonFile(opt.workdir / (name + ".anova.json"), SweepAnova(result));
  WriteTextFile(key, want);
  return result;
}

bool AllOk(const SweepResult& r, std::string& why) {
  for (const SweepRow& row : r.rows) {
    if (!row.error.empty()) {
      why = "run failed (" + row.method + " w=" + Num(row.w) + " dz=" + Num(row.delta_z) + "): " + row.error;
      return false;
    }
  }
  return true;
}

// Seed-mean of a column per w at one delta_z, for one method.
std::map<double, double> MeanByW(const SweepResult& r, const std::string& method, double dz,
                                 const std::function<double(const SweepRow&)>& value) {
  std::map<double, std::pair<double, int>> acc;
  for (const SweepRow& row : r.rows) {
    if (row.method != method || row.delta_z != dz) continue;
    acc[row.w].first += value(row);
    acc[row.w].second += 1;
  }
  std::map<double, double> out;
  for (const auto& [w, s] : acc) out[w] = s.first / s.second;
  return out;
}

double MinValue(const std::map<double, double>& m) {
  double best = INFINITY;
  for (const auto& [w, v] : m) best = std::min(best, v);
  return best;
}

double InteriorRange(const std::map<double, double>& m) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& [w, v] : m) {
    if (w <= 0.0 || w >= 1.0) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

// Balanced mixing: from the natural ratio up to an even split.
bool Balanced(double w) { return w >= NaturalToyRatio() && w <= 0.5; }

double InDist(const SweepRow& r) { return r.eval.l2_in_dist; }

// ---------------------------------------------------------------------------
// Criteria.

Outcome OracleEquivalence() {
  const double err = checks::OracleEquivalence(200, 2026);
  return {err <= 1e-8, "200 instances, max rel. error " + Num(err) + " (tol 1e-8)"};
}

Outcome GuidelineNumbers() {
  const double w_n = NaturalRatio(50, 3000);
  const double w_q = UpperRatio(50, 3000, 0.8);
  const double share = TargetShare(w_n, 50, 3000, 0.0, 2.0);
  const bool ok = std::abs(w_n - 0.0164) <= 5e-4 && std::abs(w_q - 0.1291) <= 1e-3 && share == 0.5;
  return {ok, "w_n=" + Num(w_n) + " w_q=" + Num(w_q) + " g_r(w_n)=" + FormatDouble(share)};
}

Outcome CfgIdentity() {
  ManifoldSpec spec;
  spec.n_source = 300;
  spec.n_target = 20;
  TrainConfig t;
  t.method = Method::kCfg;
  t.steps = 300;
  t.hidden = 32;
  t.batch = 64;
  t.warmup = 0;
  t.seed = 3;
  const ToyData toy = GenManifoldData(spec, 3);
  const TrainedModel model = Train(toy.data, t).model;

  Matrix obs(toy.data.d_obs(), 64);
  for (Eigen::Index j = 0; j < obs.cols(); ++j) obs.col(j) = toy.data[static_cast<size_t>(j)].obs;
  const Matrix target = TargetLabel().replicate(1, obs.cols());
  const Matrix null_label = Matrix::Zero(kLabelDim, obs.cols());
  bool ok = true;
  int compared = 0;
  for (SamplerMode mode : {SamplerMode::kProbabilityFlowOde, SamplerMode::kAncestralSde}) {
    SamplerConfig cfg;
    cfg.mode = mode;
    cfg.n_steps = 50;
    cfg.seed = 11;
    const ScoreFn cond = ModelScore(model, obs, target);
    const ScoreFn guided = GuidedScore(cond, ModelScore(model, obs, null_label), 0.0);
    const Matrix a = Sample(cond, model.schedule, cfg, 2, obs.cols());
    const Matrix b = Sample(guided, model.schedule, cfg, 2, obs.cols());
    ok = ok && BitEqual(a, b) && a.allFinite();
    compared += static_cast<int>(a.size());
  }
  // Same through the evaluation path.
  PredictorOptions plain, zero;
  plain.n_draws = zero.n_draws = 4;
  zero.guidance_lambda = 0.0;
  ok = ok && BitEqual(ModelPredictor(model, plain)(obs), ModelPredictor(model, zero)(obs));
  return {ok, std::to_string(compared) + " sampled values (ode + sde) and the evaluation predictor compared bitwise"};
}

Outcome GradientSuite() {
  struct Item {
    const char* name;
    checks::GradCheck g;
  };
  const std::vector<Item> items = {
      {"dsm", checks::DsmGradients(41, 120)},
      {"disc-reverse", checks::DiscriminatorGradients(42, DiscDirection::kReverse, 150)},
      {"disc-promote", checks::DiscriminatorGradients(43, DiscDirection::kPromote, 150)},
      {"ot", checks::OtGradients(44, 8, 8, 8)},
  };
  bool ok = true;
  std::string detail;
  for (const Item& it : items) {
    ok = ok && it.g.coordinates >= 100 && it.g.max_rel_error <= 1e-4;
    detail += std::string(detail.empty() ? "" : "; ") + it.name + " " + std::to_string(it.g.coordinates) +
              " coords max " + Num(it.g.max_rel_error);
  }
  return {ok, detail + " (tol 1e-4, >= 100 coords)"};
}

Outcome OtCorrectness() {
  const checks::OtCorrectness r = checks::OtCorrectnessSuite(50, 2026);
  const bool ok = r.exact_vs_enumeration <= 1e-9 && r.sinkhorn_rel_gap <= 0.02 && r.gw_isometric < 1e-3;
  return {ok, "exact vs enumeration " + Num(r.exact_vs_enumeration) + ", sinkhorn gap " + Num(r.sinkhorn_rel_gap) +
                  " (tol 0.02), isometric GW " + Num(r.gw_isometric) + " (tol 1e-3)"};
}

Outcome ToyRegimes(const SweepResult& sweep) {
  Outcome out;
  std::string why;
  if (!AllOk(sweep, why)) return {false, why};
  const auto at0 = MeanByW(sweep, "vanilla", 0.0, InDist);
  const auto at1 = MeanByW(sweep, "vanilla", 1.0, InDist);
  const auto at10 = MeanByW(sweep, "vanilla", 10.0, InDist);
  // (a)
  const bool a = MinValue(at1) < MinValue(at0) && MinValue(at1) < MinValue(at10);
  // (b)
  const double r0 = InteriorRange(at0), r1 = InteriorRange(at1), r10 = InteriorRange(at10);
  const bool b = r0 < 0.5 * r1 && r10 < 0.5 * r1;
  // (c)
  const nlohmann::json anova = SweepAnova(sweep);
  double share_w = NAN, share_dz = NAN;
  for (const auto& e : anova) {
    if (e["method"] == "vanilla" && e.contains("shares")) {
      share_w = e["shares"]["w"].get<double>();
      share_dz = e["shares"]["delta_z"].get<double>();
    }
  }
  const bool c = share_dz >= 1.5 * share_w;
  // (d) per seed: mean OOD L2 over balanced w vs the target-only run.
  int wins = 0, seeds = 0;
  std::map<uint64_t, std::pair<double, int>> balanced;
  std::map<uint64_t, double> target_only;
  for (const SweepRow& r : sweep.rows) {
    if (r.method != "vanilla" || r.delta_z != 1.0) continue;
    if (r.w == 1.0) target_only[r.seed] = r.eval.l2_ood;
    if (Balanced(r.w)) {
      balanced[r.seed].first += r.eval.l2_ood;
      balanced[r.seed].second += 1;
    }
  }
  std::string ood;
  for (const auto& [seed, to] : target_only) {
    if (!balanced.count(seed)) continue;
    const double mixed = balanced[seed].first / balanced[seed].second;
    wins += mixed < to ? 1 : 0;
    ++seeds;
    ood += " " + Num(mixed) + "<" + Num(to) + "?";
  }
  const bool d = seeds == 3 && wins >= 2;
  out.pass = a && b && c && d;
  out.detail = std::string("(a) ") + (a ? "pass" : "FAIL") + " min L2 dz0/dz1/dz10 = " + Num(MinValue(at0)) + "/" +
               Num(MinValue(at1)) + "/" + Num(MinValue(at10)) + "; (b) " + (b ? "pass" : "FAIL") +
               " interior ranges dz0/dz1/dz10 = " + Num(r0) + "/" + Num(r1) + "/" + Num(r10) + "; (c) " +
               (c ? "pass" : "FAIL") + " anova shares dz=" + Num(share_dz) + " w=" + Num(share_w) + "; (d) " +
               (d ? "pass" : "FAIL") + " ood wins " + std::to_string(wins) + "/" + std::to_string(seeds) + ood;
  return out;
}

Outcome AlignmentCorrelation(const SweepResult& sweep) {
  std::vector<double> x, y;
  for (const SweepRow& r : sweep.rows) {
    if (r.method != "vanilla" || r.delta_z != 1.0 || !Balanced(r.w) || !r.error.empty()) continue;
    x.push_back(-std::log(r.eval.sra.m_align));
    y.push_back(-r.eval.l2_in_dist);
  }
  if (x.size() < 3) return {false, "too few balanced rows"};
  const Correlations c = Correlate(x, y);
  return {c.spearman > 0.0 && c.spearman_p < 0.1, std::to_string(x.size()) + " balanced rows at dz=1: spearman " +
                                                       Num(c.spearman) + " (p=" + Num(c.spearman_p) + ")"};
}

Outcome DiscernibilityNecessity(const SweepResult& sweep) {
  std::string why;
  if (!AllOk(sweep, why)) return {false, why};
  const double best0 = MinValue(MeanByW(sweep, "vanilla", 0.0, InDist));
  const double best1 = MinValue(MeanByW(sweep, "vanilla", 1.0, InDist));
  ManifoldSpec spec;
  spec.delta_z = 0.0;
  double worst_probe = 0.0;
  for (uint64_t seed = 0; seed < 3; ++seed) {
    const LabeledDataset probe = MatchedSupportSample(spec, 200, seed);
    Matrix x(probe.d_obs(), static_cast<Eigen::Index>(probe.size()));
    std::vector<int> labels;
    for (size_t i = 0; i < probe.size(); ++i) {
      x.col(static_cast<Eigen::Index>(i)) = probe[i].obs;
      labels.push_back(probe[i].domain == Domain::kTarget ? 1 : 0);
    }
    worst_probe = std::max(worst_probe, LinearProbe(x, labels, seed));
  }
  return {best0 > best1 && worst_probe <= 0.65, "best L2 dz0 " + Num(best0) + " vs dz1 " + Num(best1) +
                                                    "; raw-input probe at dz0 (max over 3 seeds) " + Num(worst_probe)};
}

Outcome MethodOrdering(const SweepResult& sweep) {
  std::string why;
  if (!AllOk(sweep, why)) return {false, why};
  auto mean_of = [&sweep](const std::string& m) {
    double s = 0.0;
    int n = 0;
    for (const SweepRow& r : sweep.rows) {
      if (r.method == m) {
        s += r.eval.l2_in_dist;
        ++n;
      }
    }
    return n > 0 ? s / n : NAN;
  };
  const double vanilla = mean_of("vanilla"), combined = mean_of("cfg-adda");
  const auto reverse = MeanByW(sweep, "adda", 1.0, InDist);
  const auto promote = MeanByW(sweep, "adda-promote", 1.0, InDist);
  bool never_better = !reverse.empty() && reverse.size() == promote.size();
  std::string per_w;
  for (const auto& [w, v] : reverse) {
    const double p = promote.count(w) ? promote.at(w) : NAN;
    never_better = never_better && p >= v;
    per_w += " w=" + Num(w) + ":" + Num(p) + ">=" + Num(v) + "?";
  }
  return {combined <= vanilla && never_better, "mean L2 cfg-adda " + Num(combined) + " vs vanilla " + Num(vanilla) +
                                                   "; promote vs reverse per w (seed means)" + per_w};
}

// Runs each command twice into separate directories and compares every
// output file, then recomputes one cached sweep cell from scratch.
Outcome Determinism(const Options& opt, const SweepResult* main_sweep) {
  const fs::path root = opt.workdir / "determinism";
  fs::remove_all(root);
  RunConfig small;
  small.train.steps = 60;
  small.train.hidden = 16;
  small.train.batch = 32;
  small.train.warmup = 20;
  small.train.method = Method::kCfgAdda;
  small.manifold.n_source = 100;
  small.manifold.n_target = 10;
  small.sampler.n_steps = 10;
  small.eval = {16, 2, 20, 0.5};
  small.sweep.w = {0.1, 0.5};
  small.sweep.delta_z = {0.0, 1.0};
  small.sweep.replicates = 2;
  small.sweep.timing = false;

  std::ostringstream sink;
  auto run = [&sink](const fs::path& dir, std::vector<std::string> args) {
    std::vector<std::string> full = {"cotrain-lab"};
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const std::string& s : full) argv.push_back(s.c_str());
    std::ostringstream out;
    const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, sink);
    if (code != kExitOk) throw std::runtime_error("command failed: " + full[1] + "\n" + sink.str());
    if (!out.str().empty()) WriteTextFile(dir / (full[1] + ".stdout"), out.str());
  };
  // Paths end up inside config.json and report.json, so both passes use the
  // same directory; the first pass's files are snapshotted in memory.
  auto snapshot = [&root]() {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file()) files[fs::relative(entry.path(), root).string()] = ReadTextFile(entry.path());
    }
    return files;
  };
  std::map<std::string, std::string> first;
  for (int pass = 0; pass < 2; ++pass) {
    fs::remove_all(root);
    const fs::path d = root;
    fs::create_directories(d);
    const std::string data = (d / "data.jsonl").string();
    WriteJsonFile(d / "sweep_config.json", RunConfigToJson(small));
    run(d, {"gen-data", "--n-source", "200", "--n-target", "20", "--seed", "5", "--out", data});
    run(d, {"oracle-sample", "--data", data, "--w", "0.3", "--mode", "sde", "--n", "16", "--steps", "20"});
    run(d, {"reweight", "--n", "50", "--m", "3000", "--r-gap", "0.1", "--out", (d / "reweight.csv").string()});
    run(d, {"guideline", "--n-target", "50", "--m-source", "3000"});
    run(d, {"train", "--data", data, "--out-dir", (d / "run").string(), "--method", "cfg-adda", "--steps", "80",
            "--hidden", "16", "--batch", "32", "--warmup", "20", "--no-timing"});
    run(d, {"eval", "--run", (d / "run").string(), "--n-eval", "16"});
    run(d, {"sweep", "--config", (d / "sweep_config.json").string(), "--jobs", std::to_string(opt.jobs), "--out",
            (d / "sweep.csv").string()});
    if (pass == 0) first = snapshot();
  }
  const std::map<std::string, std::string> second = snapshot();
  const int files = static_cast<int>(first.size());
  std::string diff;
  for (const auto& [name, bytes] : first) {
    const auto it = second.find(name);
    if (it == second.end() || it->second != bytes) diff += " " + name;
  }
  if (second.size() != first.size()) diff += " (file sets differ)";
  std::string cell = "; sweep cell recompute skipped (no main sweep)";
  bool cell_ok = true;
  if (main_sweep != nullptr) {
    const RunConfig cfg = MainSweepConfig();
    const SweepRow fresh = RunCell(cfg, cfg.train, 0.1, 1.0, 0);
    SweepResult one, cached;
    one.rows = {fresh};
    for (const SweepRow& r : main_sweep->rows) {
      if (r.w == 0.1 && r.delta_z == 1.0 && r.seed == 0) cached.rows.push_back(r);
    }
    cell_ok = SweepResultToCsv(one) == SweepResultToCsv(cached);
    cell = std::string("; recomputed sweep cell (w=0.1, dz=1, seed 0) ") + (cell_ok ? "matches" : "DIFFERS");
  }
  return {diff.empty() && files > 0 && cell_ok,
          std::to_string(files) + " output files compared" + (diff.empty() ? "" : ", differing:" + diff) + cell};
}

}  // namespace
}  // namespace cotrain

int main(int argc, char** argv) {
  using namespace cotrain;
  CLI::App app{"Acceptance checks"};
  Options opt;
  std::string workdir = opt.workdir.string();
  std::vector<int> only, known;
  app.add_option("--workdir", workdir, "Where sweep tables are cached")->capture_default_str();
  app.add_option("--jobs", opt.jobs, "Sweep worker threads")->capture_default_str();
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--known-failures", known,
                 "Criteria whose failure is documented; reported but not fatal to the exit code");
  CLI11_PARSE(app, argc, argv);
  opt.workdir = workdir;
  opt.only.insert(only.begin(), only.end());
  opt.known_failures.insert(known.begin(), known.end());
  fs::create_directories(opt.workdir);

  auto wanted = [&opt](int k) { return opt.only.empty() || opt.only.count(k) > 0; };
  std::optional<SweepResult> main_sweep, method_sweep;
  auto need_main = [&]() -> const SweepResult& {
    if (!main_sweep) main_sweep = CachedSweep(opt, "sweep_main", MainSweepConfig());
    return *main_sweep;
  };

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, [] { return OracleEquivalence(); }},
      {2, [] { return GuidelineNumbers(); }},
      {3, [] { return CfgIdentity(); }},
      {4, [] { return GradientSuite(); }},
      {5, [] { return OtCorrectness(); }},
      {6, [&] { return ToyRegimes(need_main()); }},
      {7, [&] { return AlignmentCorrelation(need_main()); }},
      {8, [&] { return DiscernibilityNecessity(need_main()); }},
      {9,
       [&] {
         if (!method_sweep) method_sweep = CachedSweep(opt, "sweep_methods", MethodSweepConfig());
         return MethodOrdering(*method_sweep);
       }},
      {10, [&] { return Determinism(opt, wanted(6) || wanted(7) || wanted(8) ? &need_main() : nullptr); }},
  };
  // Wall-clock budgets for the fast criteria.
  const std::map<int, double> budget = {{1, 10.0}, {2, 1.0}, {3, 5.0}, {4, 60.0}, {5, 60.0}};

  int unexpected = 0;
  nlohmann::json report = nlohmann::json::array();
  for (const auto& [k, check] : criteria) {
    if (!wanted(k)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget.count(k) && secs > budget.at(k)) {
      o.pass = false;
      o.detail += "; over the " + Num(budget.at(k)) + " s budget";
    }
    const bool known_failure = !o.pass && opt.known_failures.count(k) > 0;
    if (!o.pass && !known_failure) ++unexpected;
    std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << (known_failure ? " (documented)" : "")
              << " [" << Num(secs) << " s] " << o.detail << std::endl;
    report.push_back({{"criterion", k}, {"pass", o.pass}, {"detail", o.detail}});
  }
  WriteJsonFile(opt.workdir / "acceptance_report.json", report);
  return unexpected == 0 ? 0 : 1;
}
