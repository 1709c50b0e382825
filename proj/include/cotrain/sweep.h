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

// Run configuration files and the (w x delta_z) toy sweep.

#ifndef COTRAIN_SWEEP_H_
#define COTRAIN_SWEEP_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cotrain/cotrain.h"
#include "cotrain/sampler.h"
#include "cotrain/toylab.h"

namespace cotrain {

struct EvalConfig {
  int n_eval = 256;
  int n_draws = 16;
  int n_probe = 200;  // per domain, matched support
  double sra_t = 0.5;
};

// A training-config override applied on top of the base config, e.g.
// {"method": "adda", "disc_direction": "promote"}.
using Variant = nlohmann::json;

struct SweepGrid {
  std::vector<double> w = {0.0, 0.005, 0.016, 0.1, 0.3, 0.5, 0.8, 1.0};
  std::vector<double> delta_z = {0.0, 0.25, 1.0, 3.0, 10.0};
  int replicates = 3;
  uint64_t base_seed = 0;  // replicate r uses seed base_seed + r
  std::vector<Variant> variants;  // empty: the base config alone
  bool timing = true;  // false writes wall_s = 0 for byte-stable tables
};

// Versioned run configuration file ("version": 1). Unknown keys are rejected
// at every level; missing sections keep their defaults.
struct RunConfig {
  std::string data;  // dataset path for train; empty for sweeps
  TrainConfig train;
  ManifoldSpec manifold;
  // False when the dataset did not come from gen-data; toy evaluation then
  // has no ground truth.
  bool has_manifold = true;
  SamplerConfig sampler;  // seed is taken from train.seed
  EvalConfig eval;
  SweepGrid sweep;
};

inline constexpr int kRunConfigVersion = 1;

nlohmann::json RunConfigToJson(const RunConfig& config);
RunConfig RunConfigFromJson(const nlohmann::json& doc);
nlohmann::json EvalConfigToJson(const EvalConfig& config);
EvalConfig EvalConfigFromJson(const nlohmann::json& doc);
nlohmann::json SamplerConfigToJson(const SamplerConfig& config);
SamplerConfig SamplerConfigFromJson(const nlohmann::json& doc);

// Applies a variant's keys to a copy of `base`.
TrainConfig ApplyVariant(const TrainConfig& base, const Variant& variant);
// "adda", "cfg-adda", ...; "-promote" appended for the promotion ablation.
std::string VariantLabel(const TrainConfig& config);

struct ToyEvaluation {
  double l2_in_dist = 0.0;
  double l2_ood = 0.0;
  SraResult sra;
};

// The evaluation every sweep cell runs; shared with the eval command so a
// standalone run reproduces a sweep row.
ToyEvaluation EvaluateToyModel(const TrainedModel& model,
                               const ManifoldSpec& spec,
                               const EvalConfig& eval,
                               SamplerConfig sampler, uint64_t seed);

struct SweepRow {
  double w = 0.0;
  double delta_z = 0.0;
  uint64_t seed = 0;
  std::string method;
  ToyEvaluation eval;
  double wall_s = 0.0;
  std::string error;  // empty on success
};

struct SweepResult {
  std::vector<SweepRow> rows;  // variant-major, then delta_z, w, seed
};

using SweepProgress = std::function<void(const SweepRow& row, size_t done, size_t total)>;

// Single cell: generate data, train, evaluate. Never throws for run
// failures; they land in row.error.
SweepRow RunCell(const RunConfig& config, const TrainConfig& train, double w,
                 double delta_z, uint64_t seed);

// Runs every cell on up to `jobs` worker threads. Row order and contents do
// not depend on `jobs`.
SweepResult RunSweep(const RunConfig& config, int jobs,
                     const SweepProgress& progress = {});

std::string SweepResultToCsv(const SweepResult& result);
SweepResult SweepResultFromCsv(const std::string& text);

// Two-way ANOVA of in-distribution L2 over (w, delta_z), per method.
nlohmann::json SweepAnova(const SweepResult& result);

}  // namespace cotrain

#endif  // COTRAIN_SWEEP_H_
