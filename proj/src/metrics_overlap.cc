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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "cotrain/metrics.h"
#include "cotrain/nn.h"
#include "cotrain/rng.h"

namespace cotrain {
namespace {

void RequireBothDomains(const LabeledDataset& data, const char* what) {
  if (data.n_target() == 0 || data.m_source() == 0) {
    throw ConfigError(std::string(what) + " needs both domains to be non-empty");
  }
}

// Mean over points of one domain of max_l p(alpha a_l | z_i).
double DomainPeakDensity(const Matrix& obs, const Matrix& actions,
                         const AlphaSigma& c, KernelKind kernel,
                         double bandwidth) {
  const Eigen::Index n = obs.cols();
  const double d = static_cast<double>(actions.rows());
  const double var = c.sigma * c.sigma;
  // Responsibilities of point j for the observation of point i.
  Matrix weights;
  if (kernel == KernelKind::kUniform) {
    weights = Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  } else {
    weights = (-SquaredDistances(obs, obs) / (2.0 * bandwidth * bandwidth)).array().exp().matrix();
    const Vector row_sum = weights.rowwise().sum();
    weights.array().colwise() /= row_sum.array();
  }
  // Unnormalised Gaussian of candidate alpha a_l under component alpha a_j.
  const Matrix gauss =
      (-(c.alpha * c.alpha) * SquaredDistances(actions, actions) / (2.0 * var)).array().exp().matrix();
  const Matrix density = weights * gauss;  // (i, l)
  const double norm = std::pow(2.0 * std::numbers::pi * var, -0.5 * d);
  // The candidates miss peaks that sit between merged components, so each
  // row's best candidate is polished by mean-shift, which never decreases
  // the density of an equal-covariance mixture.
  const Matrix centres = c.alpha * actions;
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    double peak = density.row(i).maxCoeff(&best);
    Vector y = centres.col(best);
    for (int it = 0; it < 200; ++it) {
      const Vector resp = weights.row(i).transpose().cwiseProduct(
          (-(centres.colwise() - y).colwise().squaredNorm().transpose() / (2.0 * var)).array().exp().matrix());
      const double mass = resp.sum();
      if (!(mass > 0.0)) break;
      const Vector next = centres * resp / mass;
      const double step = (next - y).norm();
      y = next;
      if (step < 1e-12) break;
    }
    const Vector at_y = weights.row(i).transpose().cwiseProduct(
        (-(centres.colwise() - y).colwise().squaredNorm().transpose() / (2.0 * var)).array().exp().matrix());
    peak = std::max(peak, at_y.sum());
    total += peak;
  }
  return norm * total / static_cast<double>(n);
}

}  // namespace

double BhattacharyyaOverlap(const LabeledDataset& data, double t,
                            const NoiseSchedule& schedule,
                            double feature_weight) {
  RequireBothDomains(data, "BhattacharyyaOverlap");
  const AlphaSigma c = Coefficients(schedule, t);
  const Matrix dist = c.alpha * c.alpha *
                          SquaredDistances(data.Actions(Domain::kTarget), data.Actions(Domain::kSource)) +
                      feature_weight * SquaredDistances(data.Observations(Domain::kTarget),
                                                        data.Observations(Domain::kSource));
  const Vector nearest = dist.rowwise().minCoeff();
  return (-nearest.array() / (8.0 * c.sigma * c.sigma)).exp().mean();
}

double Discernibility(const LabeledDataset& data, double t,
                      const NoiseSchedule& schedule, KernelKind kernel,
                      std::optional<double> bandwidth) {
  RequireBothDomains(data, "Discernibility");
  const AlphaSigma c = Coefficients(schedule, t);
  double h = 1.0;
  if (kernel == KernelKind::kGaussianRbf) {
    h = bandwidth.value_or(MedianPairwiseDistance(data.Observations()));
    if (!(h > 0.0)) throw ConfigError("Discernibility: bandwidth must be positive");
  }
  double total = 0.0;
  for (Domain k : {Domain::kTarget, Domain::kSource}) {
    total += DomainPeakDensity(data.Observations(k), data.Actions(k), c, kernel, h);
  }
  return 0.5 * total;
}

double LinearProbe(const Matrix& features, const std::vector<int>& labels,
                   uint64_t seed, const ProbeOptions& options) {
  CheckSameSize(features.cols(), static_cast<Eigen::Index>(labels.size()), "LinearProbe labels");
  std::vector<size_t> by_class[2];
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw ConfigError("LinearProbe: labels must be 0 or 1");
    by_class[labels[i]].push_back(i);
  }
  if (by_class[0].empty() || by_class[1].empty()) {
    throw ConfigError("LinearProbe: input has a single class");
  }
  if (by_class[0].size() < 20 || by_class[1].size() < 20) {
    throw ConfigError("LinearProbe: needs at least 20 samples per class");
  }
  Rng split_rng = MakeRng(seed, "probe-split");
  std::vector<size_t> train, test;
  for (auto& cls : by_class) {
    std::shuffle(cls.begin(), cls.end(), split_rng);
    const size_t n_test = std::max<size_t>(1, static_cast<size_t>(std::lround(options.test_fraction * cls.size())));
    test.insert(test.end(), cls.begin(), cls.begin() + static_cast<std::ptrdiff_t>(n_test));
    train.insert(train.end(), cls.begin() + static_cast<std::ptrdiff_t>(n_test), cls.end());
  }
  auto gather = [&](const std::vector<size_t>& idx, Matrix& x, Vector& y) {
    x.resize(features.rows(), static_cast<Eigen::Index>(idx.size()));
    y.resize(static_cast<Eigen::Index>(idx.size()));
    for (size_t j = 0; j < idx.size(); ++j) {
      x.col(static_cast<Eigen::Index>(j)) = features.col(static_cast<Eigen::Index>(idx[j]));
      y(static_cast<Eigen::Index>(j)) = labels[idx[j]];
    }
  };
  Matrix x_train, x_test;
  Vector y_train, y_test;
  gather(train, x_train, y_train);
  gather(test, x_test, y_test);
  const Vector mean = x_train.rowwise().mean();
  Vector scale = ((x_train.colwise() - mean).rowwise().squaredNorm() /
                  static_cast<double>(x_train.cols())).cwiseSqrt();
  for (Eigen::Index r = 0; r < scale.size(); ++r) {
    if (!(scale(r) > 1e-12)) scale(r) = 1.0;
  }
  auto normalize = [&](const Matrix& x) -> Matrix {
    return (x.colwise() - mean).array().colwise() / scale.array();
  };
  x_train = normalize(x_train);
  x_test = normalize(x_test);

  Rng init_rng = MakeRng(seed, "probe-init");
  Mlp net = Mlp::Initialized({features.rows(), options.hidden, 1}, 0, 0, init_rng, false);
  AdamState adam(net, AdamConfig{.lr = options.lr});
  const double inv_n = 1.0 / static_cast<double>(x_train.cols());
  for (int step = 0; step < options.steps; ++step) {
    MlpCache cache;
    const Matrix logits = net.Forward(x_train, Matrix(), &cache);
    Matrix grad(1, logits.cols());
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
      grad(0, j) = (Sigmoid(logits(0, j)) - y_train(j)) * inv_n;
    }
    adam.Step(net, net.Backward(cache, grad));
  }
  const Matrix logits = net.Forward(x_test);
  int correct = 0;
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    correct += ((logits(0, j) > 0.0) == (y_test(j) > 0.5)) ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(logits.cols());
}

}  // namespace cotrain
