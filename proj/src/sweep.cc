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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "cotrain/io.h"
#include "cotrain/metrics.h"

namespace cotrain {
namespace {

template <typename T>
std::vector<T> ListFromJson(const nlohmann::json& doc, const char* name) {
  if (!doc.is_array()) throw ConfigError(std::string("sweep: '") + name + "' must be a list");
  try {
    return doc.get<std::vector<T>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sweep: '") + name + "' has a wrong element type: " + e.what());
  }
}

nlohmann::json SweepGridToJson(const SweepGrid& g) {
  return {{"w", g.w},
          {"delta_z", g.delta_z},
          {"replicates", g.replicates},
          {"base_seed", g.base_seed},
          {"variants", g.variants},
          {"timing", g.timing}};
}

SweepGrid SweepGridFromJson(const nlohmann::json& doc) {
  RejectUnknownKeys(doc, {"w", "delta_z", "replicates", "base_seed", "variants", "timing"}, "sweep");
  SweepGrid g;
  try {
    if (doc.contains("w")) g.w = ListFromJson<double>(doc["w"], "w");
    if (doc.contains("delta_z")) g.delta_z = ListFromJson<double>(doc["delta_z"], "delta_z");
    if (doc.contains("variants")) g.variants = ListFromJson<nlohmann::json>(doc["variants"], "variants");
    g.replicates = doc.value("replicates", g.replicates);
    g.base_seed = doc.value("base_seed", g.base_seed);
    g.timing = doc.value("timing", g.timing);
  } catch (const nlohmann::json::type_error& e) {
    throw ConfigError(std::string("sweep: wrong value type: ") + e.what());
  }
  if (g.w.empty() || g.delta_z.empty()) throw ConfigError("sweep: grid must be non-empty");
  if (g.replicates < 1) throw ConfigError("sweep: replicates must be at least 1");
  for (double w : g.w) {
    if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("sweep: w values must lie in [0, 1]");
  }
  for (double dz : g.delta_z) {
    if (!(dz >= 0.0)) throw ConfigError("sweep: delta_z values must be non-negative");
  }
  return g;
}

std::string CsvSafe(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
  return s;
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double ParseCsvDouble(const std::string& s, size_t line) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("sweep csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

}  // namespace

nlohmann::json EvalConfigToJson(const EvalConfig& c) {
  return {{"n_eval", c.n_eval}, {"n_draws", c.n_draws}, {"n_probe", c.n_probe}, {"sra_t", c.sra_t}};
}

EvalConfig EvalConfigFromJson(const nlohmann::json& doc) {
  RejectUnknownKeys(doc, {"n_eval", "n_draws", "n_probe", "sra_t"}, "eval");
  EvalConfig c;
  try {
    c.n_eval = doc.value("n_eval", c.n_eval);
    c.n_draws = doc.value("n_draws", c.n_draws);
    c.n_probe = doc.value("n_probe", c.n_probe);
    c.sra_t = doc.value("sra_t", c.sra_t);
  } catch (const nlohmann::json::type_error& e) {
    throw ConfigError(std::string("eval: wrong value type: ") + e.what());
  }
  if (c.n_eval < 1 || c.n_draws < 1) throw ConfigError("eval: n_eval and n_draws must be positive");
  if (c.n_probe < 20) throw ConfigError("eval: n_probe must be at least 20");
  if (!(c.sra_t > 0.0 && c.sra_t < 1.0)) throw ConfigError("eval: sra_t must lie in (0, 1)");
  return c;
}

nlohmann::json SamplerConfigToJson(const SamplerConfig& c) {
  return {{"mode", SamplerModeName(c.mode)}, {"n_steps", c.n_steps}};
}

SamplerConfig SamplerConfigFromJson(const nlohmann::json& doc) {
  RejectUnknownKeys(doc, {"mode", "n_steps"}, "sampler");
  SamplerConfig c;
  try {
    if (doc.contains("mode")) c.mode = ParseSamplerMode(doc["mode"].get<std::string>());
    c.n_steps = doc.value("n_steps", c.n_steps);
  } catch (const nlohmann::json::type_error& e) {
    throw ConfigError(std::string("sampler: wrong value type: ") + e.what());
  }
  if (c.n_steps < 1) throw ConfigError("sampler: n_steps must be positive");
  return c;
}

nlohmann::json RunConfigToJson(const RunConfig& c) {
  nlohmann::json doc = {{"version", kRunConfigVersion},
                        {"train", TrainConfigToJson(c.train)},
                        {"sampler", SamplerConfigToJson(c.sampler)},
                        {"eval", EvalConfigToJson(c.eval)},
                        {"sweep", SweepGridToJson(c.sweep)}};
  if (!c.data.empty()) doc["data"] = c.data;
  if (c.has_manifold) doc["manifold"] = ManifoldSpecToJson(c.manifold);
  return doc;
}

RunConfig RunConfigFromJson(const nlohmann::json& doc) {
  RejectUnknownKeys(doc, {"version", "data", "train", "manifold", "sampler", "eval", "sweep"}, "config");
  if (!doc.contains("version")) throw ConfigError("config: missing 'version'");
  if (!doc["version"].is_number_integer() || doc["version"].get<int>() != kRunConfigVersion) {
    throw ConfigError("config: unsupported version " + doc["version"].dump() + " (expected 1)");
  }
  RunConfig c;
  if (doc.contains("train")) c.train = TrainConfigFromJson(doc["train"]);
  if (doc.contains("data")) {
    if (!doc["data"].is_string()) throw ConfigError("config: 'data' must be a path string");
    c.data = doc["data"].get<std::string>();
  }
  c.has_manifold = doc.contains("manifold");
  if (c.has_manifold) c.manifold = ManifoldSpecFromJson(doc["manifold"]);
  if (doc.contains("sampler")) c.sampler = SamplerConfigFromJson(doc["sampler"]);
  if (doc.contains("eval")) c.eval = EvalConfigFromJson(doc["eval"]);
  if (doc.contains("sweep")) c.sweep = SweepGridFromJson(doc["sweep"]);
  c.train.Validate();
  for (const Variant& v : c.sweep.variants) ApplyVariant(c.train, v).Validate();
  return c;
}

TrainConfig ApplyVariant(const TrainConfig& base, const Variant& variant) {
  nlohmann::json merged = TrainConfigToJson(base);
  if (!variant.is_object()) throw ConfigError("sweep: each variant must be an object");
  for (const auto& [key, value] : variant.items()) merged[key] = value;
  return TrainConfigFromJson(merged);
}

std::string VariantLabel(const TrainConfig& config) {
  std::string label(MethodName(config.method));
  if (UsesDiscriminator(config.method) && config.disc_direction == DiscDirection::kPromote) {
    label += "-promote";
  }
  return label;
}

ToyEvaluation EvaluateToyModel(const TrainedModel& model,
                               const ManifoldSpec& spec,
                               const EvalConfig& eval,
                               SamplerConfig sampler, uint64_t seed) {
  sampler.seed = seed;
  PredictorOptions opts;
  opts.sampler = sampler;
  opts.n_draws = eval.n_draws;
  const Predictor predict = ModelPredictor(model, opts);
  ToyEvaluation out;
  out.l2_in_dist = EvalL2(predict, spec, EvalRegion::kInDist, eval.n_eval, seed);
  out.l2_ood = EvalL2(predict, spec, EvalRegion::kOod, eval.n_eval, seed);
  const LabeledDataset probe = MatchedSupportSample(spec, eval.n_probe, seed);
  out.sra = SraMeasure(probe, model, eval.sra_t, seed);
  return out;
}

SweepRow RunCell(const RunConfig& config, const TrainConfig& train, double w,
                 double delta_z, uint64_t seed) {
  SweepRow row;
  row.w = w;
  row.delta_z = delta_z;
  row.seed = seed;
  row.method = VariantLabel(train);
  const auto start = std::chrono::steady_clock::now();
  try {
    ManifoldSpec spec = config.manifold;
    spec.delta_z = delta_z;
    const ToyData toy = GenManifoldData(spec, seed);
    TrainConfig cell = train;
    cell.w = w;
    cell.seed = seed;
    const TrainResult trained = Train(toy.data, cell);
    row.eval = EvaluateToyModel(trained.model, spec, config.eval, config.sampler, seed);
  } catch (const std::exception& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.eval = {nan, nan, {nan, nan, nan}};
    row.error = e.what();
  }
  row.wall_s = config.sweep.timing
                   ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
                   : 0.0;
  return row;
}

SweepResult RunSweep(const RunConfig& config, int jobs,
                     const SweepProgress& progress) {
  struct Cell {
    TrainConfig train;
    double w, delta_z;
    uint64_t seed;
  };
  std::vector<TrainConfig> variants;
  if (config.sweep.variants.empty()) {
    variants.push_back(config.train);
  } else {
    for (const Variant& v : config.sweep.variants) variants.push_back(ApplyVariant(config.train, v));
  }
  std::vector<Cell> cells;
  for (const TrainConfig& v : variants) {
    for (double dz : config.sweep.delta_z) {
      for (double w : config.sweep.w) {
        for (int r = 0; r < config.sweep.replicates; ++r) {
          cells.push_back({v, w, dz, config.sweep.base_seed + static_cast<uint64_t>(r)});
        }
      }
    }
  }
  SweepResult result;
  result.rows.resize(cells.size());
  std::atomic<size_t> next{0};
  std::mutex progress_mutex;
  size_t done = 0;
  auto worker = [&]() {
    for (size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      result.rows[i] = RunCell(config, c.train, c.w, c.delta_z, c.seed);
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(result.rows[i], ++done, cells.size());
      }
    }
  };
  const size_t n_workers = std::clamp<size_t>(static_cast<size_t>(std::max(jobs, 1)), 1, cells.size());
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return result;
}

std::string SweepResultToCsv(const SweepResult& result) {
  std::string out = "w,delta_z,seed,method,l2_in_dist,l2_ood,m_align,d_disc,probe_acc,wall_s,error\n";
  for (const SweepRow& r : result.rows) {
    out += FormatDouble(r.w) + "," + FormatDouble(r.delta_z) + "," + std::to_string(r.seed) + "," + r.method + "," +
           FormatDouble(r.eval.l2_in_dist) + "," + FormatDouble(r.eval.l2_ood) + "," +
           FormatDouble(r.eval.sra.m_align) + "," + FormatDouble(r.eval.sra.d_disc) + "," +
           FormatDouble(r.eval.sra.probe_acc) + "," + FormatDouble(r.wall_s) + "," + CsvSafe(r.error) + "\n";
  }
  return out;
}

SweepResult SweepResultFromCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("w,delta_z,seed,method", 0) != 0) {
    throw ParseError("sweep csv: missing header");
  }
  SweepResult result;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != 11) {
      throw ParseError("sweep csv line " + std::to_string(line_no) + ": expected 11 fields, got " +
                       std::to_string(f.size()));
    }
    SweepRow r;
    r.w = ParseCsvDouble(f[0], line_no);
    r.delta_z = ParseCsvDouble(f[1], line_no);
    r.seed = std::stoull(f[2]);
    r.method = f[3];
    r.eval.l2_in_dist = ParseCsvDouble(f[4], line_no);
    r.eval.l2_ood = ParseCsvDouble(f[5], line_no);
    r.eval.sra.m_align = ParseCsvDouble(f[6], line_no);
    r.eval.sra.d_disc = ParseCsvDouble(f[7], line_no);
    r.eval.sra.probe_acc = ParseCsvDouble(f[8], line_no);
    r.wall_s = ParseCsvDouble(f[9], line_no);
    r.error = f[10];
    result.rows.push_back(std::move(r));
  }
  return result;
}

nlohmann::json SweepAnova(const SweepResult& result) {
  std::map<std::string, std::vector<const SweepRow*>> by_method;
  for (const SweepRow& r : result.rows) by_method[r.method].push_back(&r);
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [method, rows] : by_method) {
    nlohmann::json entry = {{"method", method}, {"response", "l2_in_dist"},
                            {"factor_a", "w"}, {"factor_b", "delta_z"}};
    std::map<double, int> w_level, dz_level;
    for (const SweepRow* r : rows) {
      w_level.emplace(r->w, 0);
      dz_level.emplace(r->delta_z, 0);
    }
    int k = 0;
    for (auto& [v, idx] : w_level) idx = k++;
    k = 0;
    for (auto& [v, idx] : dz_level) idx = k++;
    std::vector<AnovaRecord> table;
    size_t failed = 0;
    for (const SweepRow* r : rows) {
      if (!r->error.empty() || !std::isfinite(r->eval.l2_in_dist)) {
        ++failed;
        continue;
      }
      table.push_back({w_level[r->w], dz_level[r->delta_z], r->eval.l2_in_dist});
    }
    try {
      if (failed > 0) throw ConfigError(std::to_string(failed) + " failed runs leave the design unbalanced");
      const AnovaShares s = AnovaTwoFactor(table);
      entry["shares"] = {{"w", s.a}, {"delta_z", s.b}, {"interaction", s.interaction}, {"residual", s.residual}};
      entry["ss_total"] = s.ss_total;
      entry["degenerate"] = s.degenerate;
    } catch (const ConfigError& e) {
      entry["error"] = e.what();
    }
    out.push_back(entry);
  }
  return out;
}

}  // namespace cotrain
