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

#ifndef COTRAIN_ORACLE_H_
#define COTRAIN_ORACLE_H_

#include <optional>
#include <string_view>

#include "cotrain/dataset.h"
#include "cotrain/schedule.h"
#include "cotrain/types.h"

namespace cotrain {

enum class KernelKind { kUniform, kGaussianRbf };

std::string_view KernelName(KernelKind kind);
KernelKind ParseKernel(std::string_view name);

// Softmax responsibilities of every dataset point for a noisy action, plus
// the summed per-domain mass.
struct PosteriorWeights {
  Vector g;
  double target_weight = 0.0;
  double source_weight = 0.0;
};

// Median of pairwise Euclidean distances between columns. Uses an evenly
// strided subset of at most `max_points` columns. Returns 1 when every
// distance is zero.
double MedianPairwiseDistance(const Matrix& points, Eigen::Index max_points = 1000);

// Closed-form minimiser of the mixed denoising objective
//   w * L(D_T) + (1 - w) * L(D_S)
// over an empirical dataset. Each point k contributes the per-point score
// (alpha_t a_k - a_t) / sigma_t^2 with responsibility
//   g_k = softmax_k( ln w_k - ||a_t - alpha_t a_k||^2 / (2 sigma_t^2)
//                    + ln K(z, z_k) ),
// w_k = w / N for target points and (1 - w) / M for source points. The
// Gaussian normaliser is shared by all points and cancels.
//
// Immutable after construction; all queries are const and thread-safe.
class MixtureOracle {
 public:
  // `bandwidth` defaults to the median pairwise observation distance and is
  // ignored for the uniform kernel. Throws ConfigError on an invalid
  // (w, dataset) pair or a non-positive bandwidth.
  MixtureOracle(LabeledDataset data, double w, NoiseSchedule schedule,
                KernelKind kernel = KernelKind::kUniform,
                std::optional<double> bandwidth = std::nullopt);

  PosteriorWeights Posterior(const Vector& a_t, double t,
                             const std::optional<Vector>& z = std::nullopt) const;

  // sum_k g_k (alpha_t a_k - a_t) / sigma_t^2.
  Vector Score(const Vector& a_t, double t,
               const std::optional<Vector>& z = std::nullopt) const;

  // Posterior mean E[a_0 | a_t] = sum_k g_k a_k.
  Vector Denoise(const Vector& a_t, double t,
                 const std::optional<Vector>& z = std::nullopt) const;

  // Target share of the posterior mass, hat w_t.
  double DomainWeight(const Vector& a_t, double t,
                      const std::optional<Vector>& z = std::nullopt) const;

  // g_target / g_source for one target point and one source point (indices
  // into the dataset). Returns +inf when the source weight vanishes (w = 1).
  double RelativeWeightRatio(size_t idx_target, size_t idx_source,
                             const Vector& a_t, double t) const;

  const LabeledDataset& data() const { return data_; }
  const NoiseSchedule& schedule() const { return schedule_; }
  double w() const { return w_; }
  KernelKind kernel() const { return kernel_; }
  double bandwidth() const { return bandwidth_; }

 private:
  Vector Logits(const Vector& a_t, double t,
                const std::optional<Vector>& z) const;

  LabeledDataset data_;
  double w_;
  NoiseSchedule schedule_;
  KernelKind kernel_;
  double bandwidth_ = 1.0;
  Matrix actions_;       // d_act x (N + M)
  Matrix observations_;  // d_obs x (N + M)
  Vector log_prior_;     // ln w_k per point, -inf for zero-mass domains
};

}  // namespace cotrain

#endif  // COTRAIN_ORACLE_H_
