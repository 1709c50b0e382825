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

#include "cotrain/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace cotrain {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void CheckFinite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw NumericError(std::string(what) + " contains non-finite values");
  }
}

}  // namespace

std::string_view KernelName(KernelKind kind) {
  return kind == KernelKind::kUniform ? "uniform" : "gaussian-rbf";
}

KernelKind ParseKernel(std::string_view name) {
  if (name == "uniform") return KernelKind::kUniform;
  if (name == "gaussian-rbf" || name == "rbf") return KernelKind::kGaussianRbf;
  throw ConfigError("unknown kernel '" + std::string(name) + "'");
}

double MedianPairwiseDistance(const Matrix& points, Eigen::Index max_points) {
  const Eigen::Index n = points.cols();
  if (n < 2) return 1.0;
  const Eigen::Index stride = std::max<Eigen::Index>(1, (n + max_points - 1) / max_points);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < n; i += stride) idx.push_back(i);
  std::vector<double> dist;
  dist.reserve(idx.size() * (idx.size() - 1) / 2);
  for (size_t a = 0; a < idx.size(); ++a) {
    for (size_t b = a + 1; b < idx.size(); ++b) {
      dist.push_back((points.col(idx[a]) - points.col(idx[b])).norm());
    }
  }
  if (dist.empty()) return 1.0;
  auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  return *mid > 0.0 ? *mid : 1.0;
}

MixtureOracle::MixtureOracle(LabeledDataset data, double w,
                             NoiseSchedule schedule, KernelKind kernel,
                             std::optional<double> bandwidth)
    : data_(std::move(data)), w_(w), schedule_(schedule), kernel_(kernel) {
  schedule_.Validate();
  if (!(w_ >= 0.0 && w_ <= 1.0)) {
    throw ConfigError("mixing ratio w=" + std::to_string(w_) +
                      " outside [0, 1]");
  }
  const size_t n = data_.n_target();
  const size_t m = data_.m_source();
  if (w_ == 1.0 && n == 0) {
    throw ConfigError("w = 1 requires a non-empty target dataset");
  }
  if (w_ == 0.0 && m == 0) {
    throw ConfigError("w = 0 requires a non-empty source dataset");
  }
  actions_ = data_.Actions();
  observations_ = data_.Observations();
  if (kernel_ == KernelKind::kGaussianRbf) {
    bandwidth_ = bandwidth.value_or(MedianPairwiseDistance(observations_));
    if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) {
      throw ConfigError("kernel bandwidth must be positive");
    }
  }
  const double log_wt = (n > 0 && w_ > 0.0) ? std::log(w_ / static_cast<double>(n)) : kNegInf;
  const double log_ws = (m > 0 && w_ < 1.0) ? std::log((1.0 - w_) / static_cast<double>(m)) : kNegInf;
  log_prior_.resize(static_cast<Eigen::Index>(data_.size()));
  for (size_t i = 0; i < data_.size(); ++i) {
    log_prior_(static_cast<Eigen::Index>(i)) =
        data_[i].domain == Domain::kTarget ? log_wt : log_ws;
  }
}

Vector MixtureOracle::Logits(const Vector& a_t, double t,
                             const std::optional<Vector>& z) const {
  CheckSameSize(a_t.size(), data_.d_act(), "noisy action");
  CheckFinite(a_t, "noisy action");
  if (!std::isfinite(t)) throw NumericError("time is not finite");
  const AlphaSigma c = Coefficients(schedule_, t);
  const double inv_two_var = 1.0 / (2.0 * c.sigma * c.sigma);
  // ||a_t - alpha a_k||^2 / (2 sigma^2) == r_k^2 d / 2
  Vector logits = log_prior_ -
                  ((actions_ * c.alpha).colwise() - a_t).colwise().squaredNorm().transpose() *
                      inv_two_var;
  if (z.has_value()) {
    if (kernel_ != KernelKind::kGaussianRbf) {
      throw ConfigError("observation conditioning requires the gaussian-rbf kernel");
    }
    CheckSameSize(z->size(), data_.d_obs(), "observation");
    CheckFinite(*z, "observation");
    const double inv_two_h2 = 1.0 / (2.0 * bandwidth_ * bandwidth_);
    logits -= (observations_.colwise() - *z).colwise().squaredNorm().transpose() *
              inv_two_h2;
  }
  return logits;
}

PosteriorWeights MixtureOracle::Posterior(const Vector& a_t, double t,
                                          const std::optional<Vector>& z) const {
  const Vector logits = Logits(a_t, t, z);
  const double max_logit = logits.maxCoeff();
  if (!std::isfinite(max_logit)) {
    throw NumericError("posterior has no finite logit");
  }
  PosteriorWeights out;
  // std::exp rather than Eigen's vectorised exp, which clamps -inf to a
  // denormal instead of returning an exact zero.
  out.g.resize(logits.size());
  for (Eigen::Index i = 0; i < logits.size(); ++i) out.g(i) = std::exp(logits(i) - max_logit);
  out.g /= out.g.sum();
  for (size_t i = 0; i < data_.size(); ++i) {
    const double gi = out.g(static_cast<Eigen::Index>(i));
    if (data_[i].domain == Domain::kTarget) {
      out.target_weight += gi;
    } else {
      out.source_weight += gi;
    }
  }
  return out;
}

Vector MixtureOracle::Denoise(const Vector& a_t, double t,
                              const std::optional<Vector>& z) const {
  return actions_ * Posterior(a_t, t, z).g;
}

Vector MixtureOracle::Score(const Vector& a_t, double t,
                            const std::optional<Vector>& z) const {
  const Vector mean = Denoise(a_t, t, z);
  const AlphaSigma c = Coefficients(schedule_, t);
  return (c.alpha * mean - a_t) / (c.sigma * c.sigma);
}

double MixtureOracle::DomainWeight(const Vector& a_t, double t,
                                   const std::optional<Vector>& z) const {
  return Posterior(a_t, t, z).target_weight;
}

double MixtureOracle::RelativeWeightRatio(size_t idx_target, size_t idx_source,
                                          const Vector& a_t, double t) const {
  if (idx_target >= data_.size() || idx_source >= data_.size()) {
    throw std::out_of_range("RelativeWeightRatio: index out of range");
  }
  if (data_[idx_target].domain != Domain::kTarget ||
      data_[idx_source].domain != Domain::kSource) {
    throw ConfigError("RelativeWeightRatio: indices must address a target and a source point");
  }
  const Vector logits = Logits(a_t, t, std::nullopt);
  const double lt = logits(static_cast<Eigen::Index>(idx_target));
  const double ls = logits(static_cast<Eigen::Index>(idx_source));
  if (lt == kNegInf && ls == kNegInf) {
    throw NumericError("relative weight ratio undefined: both weights are zero");
  }
  return std::exp(lt - ls);
}

}  // namespace cotrain
