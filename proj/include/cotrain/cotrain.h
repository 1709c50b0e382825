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

#ifndef COTRAIN_COTRAIN_H_
#define COTRAIN_COTRAIN_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cotrain/dataset.h"
#include "cotrain/nn.h"
#include "cotrain/rng.h"
#include "cotrain/sampler.h"
#include "cotrain/schedule.h"
#include "cotrain/types.h"

namespace cotrain {

enum class Method { kVanilla, kOt, kAdda, kCfg, kCfgAdda };
enum class DiscDirection { kReverse, kPromote };

std::string_view MethodName(Method method);
Method ParseMethod(std::string_view name);
std::string_view DiscDirectionName(DiscDirection direction);
DiscDirection ParseDiscDirection(std::string_view name);

inline bool UsesLabels(Method m) { return m == Method::kCfg || m == Method::kCfgAdda; }
inline bool UsesDiscriminator(Method m) { return m == Method::kAdda || m == Method::kCfgAdda; }

struct TrainConfig {
  Method method = Method::kVanilla;
  double w = 0.5;
  int batch = 256;
  int steps = 20000;
  double lr = 1e-3;
  uint64_t seed = 0;
  double p_drop = 0.2;
  double lambda_disc = 0.1;
  double lambda_ot = 0.1;
  int warmup = 5000;
  DiscDirection disc_direction = DiscDirection::kReverse;
  double grl_strength = 1.0;
  // Architecture.
  int hidden = 128;
  int time_embed_dim = 16;
  int disc_hidden = 64;
  // Sinkhorn epsilon for the OT term, relative to the batch mean cost.
  double ot_epsilon = 0.05;
  // Loss trajectory thinning.
  int log_every = 100;

  void Validate() const;
};

nlohmann::json TrainConfigToJson(const TrainConfig& config);
// Rejects unknown keys; missing keys keep their defaults.
TrainConfig TrainConfigFromJson(const nlohmann::json& doc);

// One training batch, column-stacked.
struct Batch {
  Matrix obs;
  Matrix actions;
  std::vector<Domain> domains;
  Eigen::Index size() const { return obs.cols(); }
  Eigen::Index count(Domain d) const;
};

// round(batch * w) target samples, clamped to >= 1 when w > 0 and to
// <= batch - 1 when w < 1; the rest from the source. Both drawn uniformly with
// replacement, then shuffled together.
int TargetCount(double w, int batch);
Batch SampleMixedBatch(const LabeledDataset& data, double w, int batch, Rng& rng);

// Environment labels: one-hot (target, source); the null token is zeros.
inline constexpr Eigen::Index kLabelDim = 2;
Matrix OneHotLabels(const std::vector<Domain>& domains);
Vector TargetLabel();

// 4-layer denoiser eps_theta: two encoder layers on the observation, then the
// head on [z; a_t; embed(t); label].
Mlp MakeDenoiser(Eigen::Index d_obs, Eigen::Index d_act, int hidden,
                 int time_embed_dim, bool with_labels, Rng& rng);
// 3-layer discriminator on encoder features, one logit out.
Mlp MakeDiscriminator(Eigen::Index feature_dim, int hidden, Rng& rng);

Matrix DenoiserSideInput(const Matrix& a_t, const Vector& t,
                         int time_embed_dim, const Matrix& labels);

struct DsmForwardPass {
  double loss = 0.0;
  Matrix grad_output;  // d loss / d eps_hat
  Matrix features;     // encoder output z
  MlpCache cache;
};

// Per-sample t ~ U[t_min, t_max], eps ~ N(0, I); loss is the batch mean of
// ||eps - eps_theta(a_t, t, obs, label)||^2. `labels` is empty for
// unconditional denoisers.
DsmForwardPass DsmForward(const Mlp& net, const Batch& batch,
                          const Matrix& labels, const NoiseSchedule& schedule,
                          int time_embed_dim, Rng& rng);

struct LossAndGradients {
  double loss = 0.0;
  MlpGradients grads;
};

LossAndGradients DsmLoss(const Mlp& net, const Batch& batch,
                         const Matrix& labels, const NoiseSchedule& schedule,
                         int time_embed_dim, Rng& rng);

struct FeatureLoss {
  double loss = 0.0;
  Matrix grad_target;  // d loss / d z_t
  Matrix grad_source;  // d loss / d z_s
  bool converged = true;
};

// <P, C> with C the squared Euclidean cost between feature columns and P the
// Sinkhorn plan (uniform marginals). Gradients hold P fixed.
FeatureLoss OtLoss(const Matrix& z_target, const Matrix& z_source,
                   double epsilon_scale = 0.05, int max_iter = 300,
                   double tol = 1e-6);

struct DiscLoss {
  double loss = 0.0;
  MlpGradients disc_grads;
  Matrix grad_target;
  Matrix grad_source;
};

// -mean log D(z_s) - mean log(1 - D(z_t)); D = sigmoid(disc logit).
DiscLoss DiscriminatorLoss(const Mlp& disc, const Matrix& z_target,
                           const Matrix& z_source);

struct LossRecord {
  int step = 0;
  double total = 0.0;
  double dsm = 0.0;
  double ot = 0.0;
  double disc = 0.0;
};

struct TrainReport {
  LossRecord final_losses;
  std::vector<LossRecord> trajectory;
  double wall_seconds = 0.0;
  std::string checkpoint_path;
  // OT solves that hit max_iter and fell back to the last iterate.
  int ot_unconverged = 0;
};

// Denoiser plus everything needed to turn it back into a score function.
struct TrainedModel {
  Mlp denoiser;
  Mlp discriminator;  // zero-layer default when unused
  bool has_discriminator = false;
  bool conditional = false;
  int time_embed_dim = 16;
  NoiseSchedule schedule;
};

nlohmann::json TrainedModelToJson(const TrainedModel& model);
TrainedModel TrainedModelFromJson(const nlohmann::json& doc);

struct TrainResult {
  TrainedModel model;
  TrainReport report;
};

// Runs config.steps optimisation steps. Throws NumericError naming the step
// when the total loss becomes non-finite or exceeds 1e6.
TrainResult Train(const LabeledDataset& data, const TrainConfig& config,
                  const NoiseSchedule& schedule = {});

// Score of a trained model for fixed per-column observations (and labels,
// for conditional models): s = -eps_theta / sigma_t. `model` must outlive
// the returned function.
ScoreFn ModelScore(const TrainedModel& model, Matrix obs, Matrix labels);

// Writes config.json, checkpoint.json, losses.csv and report.json.
void WriteRunDirectory(const std::filesystem::path& dir,
                       const nlohmann::json& resolved_config,
                       TrainResult& result);

}  // namespace cotrain

#endif  // COTRAIN_COTRAIN_H_
