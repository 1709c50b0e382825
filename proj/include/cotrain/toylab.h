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

// Synthetic source/target manifolds with a controllable latent offset.
//
// A latent u in [0, 1] drives both domains. Inputs lie on a half circle
// (cos pi u, sin pi u) lifted to height z = 0 (source) or z = delta_z
// (target); outputs follow y_S(u) = (u, sin(2 pi u) / 2) and
// y_T(u) = y_S(u) + action_gap. The target only covers part of the latent
// range; the rest is the out-of-distribution (OOD) region.

#ifndef COTRAIN_TOYLAB_H_
#define COTRAIN_TOYLAB_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

#include "cotrain/cotrain.h"
#include "cotrain/dataset.h"
#include "cotrain/sampler.h"
#include "cotrain/types.h"

namespace cotrain {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct ManifoldSpec {
  double delta_z = 1.0;
  Eigen::Vector2d action_gap{0.2, -0.2};
  Interval target_u{0.0, 0.5};
  Interval ood_u{0.5, 1.0};  // open at lo
  int n_source = 3000;
  int n_target = 30;
  double obs_noise = 0.01;

  void Validate() const;
};

nlohmann::json ManifoldSpecToJson(const ManifoldSpec& spec);
ManifoldSpec ManifoldSpecFromJson(const nlohmann::json& doc);

// Noiseless ground truth.
Vector ToyInput(const ManifoldSpec& spec, double u, Domain domain);
Vector SourceOutput(double u);
Vector TargetOutput(const ManifoldSpec& spec, double u);

struct ToyData {
  LabeledDataset data;
  Vector latent;  // u of every record, same order
};

// Target records first, then source.
ToyData GenManifoldData(const ManifoldSpec& spec, uint64_t seed);

// Balanced probe set on matched support: n_per_domain target points and
// n_per_domain source points, all with u in the target range. Comparing the
// domains where both have data isolates the offset from the coverage gap.
LabeledDataset MatchedSupportSample(const ManifoldSpec& spec,
                                    Eigen::Index n_per_domain, uint64_t seed);

enum class EvalRegion { kInDist, kOod };
std::string_view EvalRegionName(EvalRegion region);
EvalRegion ParseEvalRegion(std::string_view name);

// Maps inputs (d_obs x n) to predicted outputs (d_act x n).
using Predictor = std::function<Matrix(const Matrix& x)>;

// Mean ||predict(x_T(u)) - y_T(u)||^2 over n_eval noiseless target inputs with
// u uniform in the region.
double EvalL2(const Predictor& predict, const ManifoldSpec& spec,
              EvalRegion region, Eigen::Index n_eval, uint64_t seed);

struct PredictorOptions {
  SamplerConfig sampler;
  int n_draws = 16;
  // Guidance strength for conditional models; nullopt samples the
  // conditional score directly.
  std::optional<double> guidance_lambda;
};

// Mean of n_draws sampler draws per input. Conditional models are queried
// with the target label. `model` must outlive the predictor.
Predictor ModelPredictor(const TrainedModel& model,
                         const PredictorOptions& options);

struct SraResult {
  double m_align = 0.0;
  double d_disc = 0.0;
  double probe_acc = 0.0;
};

// Alignment and discernibility of the denoiser's encoder features on
// `probe` (usually MatchedSupportSample). Features are standardized jointly,
// so a pure offset between the domains still counts as misalignment.
SraResult SraMeasure(const LabeledDataset& probe, const TrainedModel& model,
                     double t, uint64_t seed);

}  // namespace cotrain

#endif  // COTRAIN_TOYLAB_H_
