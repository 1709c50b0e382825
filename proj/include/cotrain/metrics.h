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

#ifndef COTRAIN_METRICS_H_
#define COTRAIN_METRICS_H_

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "cotrain/dataset.h"
#include "cotrain/oracle.h"
#include "cotrain/schedule.h"
#include "cotrain/types.h"

namespace cotrain {

// ---------------------------------------------------------------------------
// Optimal transport. Point sets are column-stacked (dim x count).

struct SinkhornResult {
  Matrix plan;
  double cost = 0.0;            // <plan, cost>
  double marginal_error = 0.0;  // L1 row + column marginal violation
  int iterations = 0;
  bool converged = false;
};

// Entropic OT between histograms a (rows) and b (cols), solved in the log
// domain. Convergence when the L1 marginal error drops below `tol`; otherwise
// the last iterate is returned with converged == false.
SinkhornResult Sinkhorn(const Matrix& cost, const Vector& a, const Vector& b,
                        double epsilon, int max_iter = 1000,
                        double tol = 1e-9);

struct Assignment {
  std::vector<int> row_to_col;
  double cost = 0.0;  // sum of cost(i, row_to_col[i])
};

// Minimum-cost perfect matching (Hungarian method with potentials), O(n^3).
Assignment ExactAssignment(const Matrix& cost);

// Squared Euclidean distance between every column of x and of y.
Matrix SquaredDistances(const Matrix& x, const Matrix& y);

// Per-dimension zero mean / unit variance; zero-variance dims are centred only.
Matrix Standardize(const Matrix& points);

struct WassersteinOptions {
  bool standardize = true;
  Eigen::Index exact_limit = 512;
  double epsilon_scale = 0.05;  // Sinkhorn epsilon = scale * mean cost
  int max_iter = 2000;
};

// W2 distance between two empirical point sets: exact assignment when both
// sets have the same size <= exact_limit, Sinkhorn otherwise.
double Wasserstein(const Matrix& x, const Matrix& y,
                   const WassersteinOptions& options = {});

struct GromovResult {
  double value = 0.0;
  Matrix plan;
  int iterations = 0;
  bool converged = false;
};

// Entropic square-loss Gromov-Wasserstein between intra-set squared distance
// matrices, both divided by their pooled mean. Alternates linearisation and
// Sinkhorn from the uniform product plan.
GromovResult GromovWasserstein(const Matrix& x, const Matrix& y,
                               double epsilon = 3e-3, int max_iter = 200,
                               double tol = 1e-9);

// Draws min(n, max_points) columns without replacement; deterministic in seed.
Matrix Subsample(const Matrix& points, Eigen::Index max_points, uint64_t seed);

// ---------------------------------------------------------------------------
// Overlap and discernibility.

// Mean over target points of the best equal-covariance Bhattacharyya
// coefficient against any source point, on concatenated action+observation
// coordinates at noise level t:
//   exp(-(alpha^2 |a_i - a_j|^2 + feature_weight |z_i - z_j|^2) / (8 sigma^2)).
double BhattacharyyaOverlap(const LabeledDataset& data, double t,
                            const NoiseSchedule& schedule,
                            double feature_weight = 1.0);

// 1/2 sum_k mean_{z_i in k} max_{a_t} p_k(a_t | z_i), where p_k is the
// kernel-weighted Gaussian mixture over domain k's own points and the max is
// taken over the candidates {alpha_t a_j : j in k}.
double Discernibility(const LabeledDataset& data, double t,
                      const NoiseSchedule& schedule,
                      KernelKind kernel = KernelKind::kGaussianRbf,
                      std::optional<double> bandwidth = std::nullopt);

struct ProbeOptions {
  Eigen::Index hidden = 64;
  int steps = 2000;
  double lr = 1e-2;
  double test_fraction = 0.2;
};

// Held-out accuracy of a one-hidden-layer classifier predicting a binary
// label from feature columns. Stratified split; throws ConfigError with
// fewer than 20 samples in either class.
double LinearProbe(const Matrix& features, const std::vector<int>& labels,
                   uint64_t seed, const ProbeOptions& options = {});

// ---------------------------------------------------------------------------
// Statistics.

struct Correlations {
  double pearson = 0.0;
  double pearson_p = 1.0;
  double spearman = 0.0;
  double spearman_p = 1.0;
};

// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> AverageRanks(const std::vector<double>& x);

// Two-sided p-values from Student t with n - 2 degrees of freedom.
Correlations Correlate(const std::vector<double>& x,
                       const std::vector<double>& y);

struct AnovaRecord {
  int factor_a = 0;  // level index
  int factor_b = 0;
  double response = 0.0;
};

struct AnovaShares {
  double a = 0.0;
  double b = 0.0;
  double interaction = 0.0;
  double residual = 0.0;
  double ss_total = 0.0;
  bool degenerate = false;  // ss_total == 0
};

// Fixed-effects two-way decomposition on a complete, balanced factorial
// table. Throws ConfigError on missing cells or unequal replicate counts.
AnovaShares AnovaTwoFactor(const std::vector<AnovaRecord>& table);

// Projection of the centred rows of `features` (samples x dims) onto the
// leading principal directions found by deflated power iteration.
// Returns samples x dims_out.
Matrix PcaProject(const Matrix& features, Eigen::Index dims_out = 2,
                  uint64_t seed = 0);

// ---------------------------------------------------------------------------

struct MetricsReport {
  std::optional<double> w_distance;
  std::optional<double> gw_distance;
  std::optional<double> bhattacharyya;
  std::optional<double> probe_accuracy;
  std::optional<double> d_disc;
  std::optional<Correlations> correlations;
};

nlohmann::json MetricsReportToJson(const MetricsReport& report);

}  // namespace cotrain

#endif  // COTRAIN_METRICS_H_
