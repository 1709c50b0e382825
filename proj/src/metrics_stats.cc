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
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "cotrain/metrics.h"
#include "cotrain/rng.h"

namespace cotrain {
namespace {

double Pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw ConfigError("correlation undefined: an input has zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double TwoSidedP(double r, size_t n) {
  const double dof = static_cast<double>(n) - 2.0;
  if (std::abs(r) >= 1.0) return 0.0;
  const double t = r * std::sqrt(dof / (1.0 - r * r));
  const boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

}  // namespace

std::vector<double> AverageRanks(const std::vector<double>& x) {
  std::vector<size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

Correlations Correlate(const std::vector<double>& x,
                       const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeError("Correlate: inputs differ in length");
  if (x.size() < 3) throw ConfigError("Correlate: needs at least 3 samples");
  Correlations out;
  out.pearson = Pearson(x, y);
  out.pearson_p = TwoSidedP(out.pearson, x.size());
  out.spearman = Pearson(AverageRanks(x), AverageRanks(y));
  out.spearman_p = TwoSidedP(out.spearman, x.size());
  return out;
}

AnovaShares AnovaTwoFactor(const std::vector<AnovaRecord>& table) {
  if (table.empty()) throw ConfigError("ANOVA: empty table");
  std::map<int, size_t> a_levels, b_levels;
  for (const AnovaRecord& r : table) {
    a_levels.emplace(r.factor_a, 0);
    b_levels.emplace(r.factor_b, 0);
  }
  size_t k = 0;
  for (auto& [level, idx] : a_levels) idx = k++;
  k = 0;
  for (auto& [level, idx] : b_levels) idx = k++;
  const size_t na = a_levels.size();
  const size_t nb = b_levels.size();
  std::vector<double> cell_sum(na * nb, 0.0);
  std::vector<size_t> cell_n(na * nb, 0);
  for (const AnovaRecord& r : table) {
    const size_t c = a_levels[r.factor_a] * nb + b_levels[r.factor_b];
    cell_sum[c] += r.response;
    ++cell_n[c];
  }
  const size_t reps = cell_n.front();
  for (size_t c = 0; c < cell_n.size(); ++c) {
    if (cell_n[c] == 0) throw ConfigError("ANOVA: incomplete design, a factor cell is missing");
    if (cell_n[c] != reps) throw ConfigError("ANOVA: unbalanced design, replicate counts differ");
  }
  const double r = static_cast<double>(reps);
  std::vector<double> cell_mean(na * nb), a_mean(na, 0.0), b_mean(nb, 0.0);
  double grand = 0.0;
  for (size_t i = 0; i < na; ++i) {
    for (size_t j = 0; j < nb; ++j) {
      const double m = cell_sum[i * nb + j] / r;
      cell_mean[i * nb + j] = m;
      a_mean[i] += m / static_cast<double>(nb);
      b_mean[j] += m / static_cast<double>(na);
      grand += m / static_cast<double>(na * nb);
    }
  }
  AnovaShares out;
  double ss_a = 0.0, ss_b = 0.0, ss_ab = 0.0, ss_e = 0.0;
  for (size_t i = 0; i < na; ++i) ss_a += r * static_cast<double>(nb) * (a_mean[i] - grand) * (a_mean[i] - grand);
  for (size_t j = 0; j < nb; ++j) ss_b += r * static_cast<double>(na) * (b_mean[j] - grand) * (b_mean[j] - grand);
  for (size_t i = 0; i < na; ++i) {
    for (size_t j = 0; j < nb; ++j) {
      const double e = cell_mean[i * nb + j] - a_mean[i] - b_mean[j] + grand;
      ss_ab += r * e * e;
    }
  }
  for (const AnovaRecord& rec : table) {
    const double e = rec.response - cell_mean[a_levels[rec.factor_a] * nb + b_levels[rec.factor_b]];
    ss_e += e * e;
    out.ss_total += (rec.response - grand) * (rec.response - grand);
  }
  if (!(out.ss_total > 0.0)) {
    out.degenerate = true;
    out.ss_total = 0.0;
    return out;
  }
  out.a = ss_a / out.ss_total;
  out.b = ss_b / out.ss_total;
  out.interaction = ss_ab / out.ss_total;
  out.residual = ss_e / out.ss_total;
  return out;
}

Matrix PcaProject(const Matrix& features, Eigen::Index dims_out,
                  uint64_t seed) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (dims_out < 1 || dims_out > d) throw ShapeError("PcaProject: dims_out out of range");
  if (n < dims_out) throw ShapeError("PcaProject: fewer samples than output dims");
  const Matrix centred = features.rowwise() - features.colwise().mean();
  const Matrix cov = centred.transpose() * centred / static_cast<double>(n);
  Rng rng = MakeRng(seed, "pca");
  Matrix basis(d, dims_out);
  for (Eigen::Index k = 0; k < dims_out; ++k) {
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = Normal(rng);
    auto orthogonalize = [&](Vector& u) {
      for (Eigen::Index p = 0; p < k; ++p) u -= basis.col(p).dot(u) * basis.col(p);
    };
    orthogonalize(v);
    v.normalize();
    for (int it = 0; it < 200000; ++it) {
      Vector next = cov * v;
      orthogonalize(next);
      const double norm = next.norm();
      if (norm < 1e-300) break;  // remaining spectrum is zero
      next /= norm;
      const double change = std::min((next - v).norm(), (next + v).norm());
      v = std::move(next);
      if (change < 1e-15) break;
    }
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    basis.col(k) = v;
  }
  return centred * basis;
}

nlohmann::json MetricsReportToJson(const MetricsReport& report) {
  nlohmann::json doc = nlohmann::json::object();
  if (report.w_distance) doc["w_distance"] = *report.w_distance;
  if (report.gw_distance) doc["gw_distance"] = *report.gw_distance;
  if (report.bhattacharyya) doc["bhattacharyya"] = *report.bhattacharyya;
  if (report.probe_accuracy) doc["probe_accuracy"] = *report.probe_accuracy;
  if (report.d_disc) doc["d_disc"] = *report.d_disc;
  if (report.correlations) {
    const Correlations& c = *report.correlations;
    doc["pearson"] = {{"rho", c.pearson}, {"p", c.pearson_p}};
    doc["spearman"] = {{"rho", c.spearman}, {"p", c.spearman_p}};
  }
  return doc;
}

}  // namespace cotrain
