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
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "cotrain/metrics.h"
#include "cotrain/rng.h"

namespace cotrain {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double LogSumExp(const double* v, Eigen::Index n, Eigen::Index stride) {
  double mx = -kInf;
  for (Eigen::Index i = 0; i < n; ++i) mx = std::max(mx, v[i * stride]);
  if (mx == -kInf) return -kInf;
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) s += std::exp(v[i * stride] - mx);
  return mx + std::log(s);
}

void CheckHistogram(const Vector& h, const char* name) {
  if ((h.array() < 0.0).any() || !h.allFinite()) {
    throw ConfigError(std::string(name) + " must be finite and nonnegative");
  }
  if (std::abs(h.sum() - 1.0) > 1e-8) {
    throw ConfigError(std::string(name) + " must sum to 1");
  }
}

}  // namespace

SinkhornResult Sinkhorn(const Matrix& cost, const Vector& a, const Vector& b,
                        double epsilon, int max_iter, double tol) {
  const Eigen::Index n = cost.rows();
  const Eigen::Index m = cost.cols();
  CheckSameSize(a.size(), n, "Sinkhorn row weights");
  CheckSameSize(b.size(), m, "Sinkhorn column weights");
  if (n == 0 || m == 0) throw ShapeError("Sinkhorn: empty cost matrix");
  if (!cost.allFinite()) throw NumericError("Sinkhorn: cost is not finite");
  if (!(epsilon > 0.0)) throw ConfigError("Sinkhorn: epsilon must be positive");
  CheckHistogram(a, "Sinkhorn row weights");
  CheckHistogram(b, "Sinkhorn column weights");

  const Vector log_a = a.array().log().matrix();
  const Vector log_b = b.array().log().matrix();
  // Scaled kernel -C / eps, row-major scratch for both sweeps.
  const Matrix neg_c = -cost / epsilon;
  Vector f = Vector::Zero(n);  // dual potentials divided by epsilon
  Vector g = Vector::Zero(m);
  Matrix scratch(n, m);

  SinkhornResult result;
  auto row_error = [&]() {
    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double row = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) row += std::exp(f(i) + g(j) + neg_c(i, j));
      err += std::abs(row - a(i));
    }
    return err;
  };

  for (int it = 0; it < max_iter; ++it) {
    scratch = neg_c.rowwise() + g.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      f(i) = a(i) > 0.0 ? log_a(i) - LogSumExp(scratch.data() + i, m, n) : -kInf;
    }
    scratch = neg_c.colwise() + f;
    for (Eigen::Index j = 0; j < m; ++j) {
      g(j) = b(j) > 0.0 ? log_b(j) - LogSumExp(scratch.data() + j * n, n, 1) : -kInf;
    }
    result.iterations = it + 1;
    // Columns are exact after the g update; rows carry the whole error.
    if ((it % 5 == 4) || it + 1 == max_iter) {
      result.marginal_error = row_error();
      if (result.marginal_error <= tol) {
        result.converged = true;
        break;
      }
    }
  }
  result.plan.resize(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = f(i) + g(j) + neg_c(i, j);
      result.plan(i, j) = v == -kInf ? 0.0 : std::exp(v);
    }
  }
  result.cost = result.plan.cwiseProduct(cost).sum();
  result.marginal_error = (result.plan.rowwise().sum() - a).lpNorm<1>() +
                          (result.plan.colwise().sum().transpose() - b).lpNorm<1>();
  return result;
}

Assignment ExactAssignment(const Matrix& cost) {
  const Eigen::Index n = cost.rows();
  if (cost.cols() != n) {
    throw ShapeError("ExactAssignment: cost must be square, got " +
                     std::to_string(cost.rows()) + "x" + std::to_string(cost.cols()));
  }
  if (!cost.allFinite()) throw NumericError("ExactAssignment: cost is not finite");
  // Shortest augmenting paths with row/column potentials (1-based arrays).
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Eigen::Index> match(n + 1, 0), way(n + 1, 0);
  for (Eigen::Index i = 1; i <= n; ++i) {
    match[0] = i;
    Eigen::Index j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const Eigen::Index i0 = match[j0];
      double delta = kInf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const Eigen::Index j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Assignment out;
  out.row_to_col.assign(static_cast<size_t>(n), -1);
  for (Eigen::Index j = 1; j <= n; ++j) {
    out.row_to_col[static_cast<size_t>(match[j] - 1)] = static_cast<int>(j - 1);
  }
  for (Eigen::Index i = 0; i < n; ++i) out.cost += cost(i, out.row_to_col[static_cast<size_t>(i)]);
  return out;
}

Matrix SquaredDistances(const Matrix& x, const Matrix& y) {
  CheckSameSize(x.rows(), y.rows(), "SquaredDistances dimension");
  Matrix d = (-2.0 * x.transpose() * y).colwise() + x.colwise().squaredNorm().transpose();
  d.rowwise() += y.colwise().squaredNorm();
  return d.cwiseMax(0.0);
}

Matrix Standardize(const Matrix& points) {
  if (points.cols() == 0) return points;
  const Vector mean = points.rowwise().mean();
  Matrix centred = points.colwise() - mean;
  const Vector var = centred.rowwise().squaredNorm() / static_cast<double>(points.cols());
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    if (var(r) > 1e-24) centred.row(r) /= std::sqrt(var(r));
  }
  return centred;
}

double Wasserstein(const Matrix& x, const Matrix& y,
                   const WassersteinOptions& options) {
  if (x.cols() == 0 || y.cols() == 0) throw ShapeError("Wasserstein: empty point set");
  CheckSameSize(x.rows(), y.rows(), "Wasserstein dimension");
  const Matrix xs = options.standardize ? Standardize(x) : x;
  const Matrix ys = options.standardize ? Standardize(y) : y;
  const Matrix cost = SquaredDistances(xs, ys);
  double value = 0.0;
  if (x.cols() == y.cols() && x.cols() <= options.exact_limit) {
    value = ExactAssignment(cost).cost / static_cast<double>(x.cols());
  } else {
    const double mean_cost = cost.mean();
    if (mean_cost == 0.0) return 0.0;
    const Vector a = Vector::Constant(x.cols(), 1.0 / static_cast<double>(x.cols()));
    const Vector b = Vector::Constant(y.cols(), 1.0 / static_cast<double>(y.cols()));
    value = Sinkhorn(cost, a, b, options.epsilon_scale * mean_cost, options.max_iter, 1e-6).cost;
  }
  return std::sqrt(std::max(0.0, value));
}

GromovResult GromovWasserstein(const Matrix& x, const Matrix& y,
                               double epsilon, int max_iter, double tol) {
  if (x.cols() == 0 || y.cols() == 0) throw ShapeError("GromovWasserstein: empty point set");
  const Eigen::Index n = x.cols();
  const Eigen::Index m = y.cols();
  Matrix c1 = SquaredDistances(x, x);
  Matrix c2 = SquaredDistances(y, y);
  const double pooled = (c1.sum() + c2.sum()) / static_cast<double>(n * n + m * m);
  if (pooled > 0.0) {
    c1 /= pooled;
    c2 /= pooled;
  }
  const Vector p = Vector::Constant(n, 1.0 / static_cast<double>(n));
  const Vector q = Vector::Constant(m, 1.0 / static_cast<double>(m));
  // Square loss: L(T) = const - 2 C1 T C2^T with
  // const = (C1.^2) p 1^T + 1 q^T (C2.^2)^T.
  const Vector c1p = c1.cwiseProduct(c1) * p;
  const Vector c2q = c2.cwiseProduct(c2) * q;
  Matrix const_c = c1p.replicate(1, m);
  const_c.rowwise() += c2q.transpose();
  auto linearized = [&](const Matrix& t) -> Matrix { return const_c - 2.0 * c1 * t * c2.transpose(); };

  GromovResult out;
  out.plan = p * q.transpose();
  for (int it = 0; it < max_iter; ++it) {
    Matrix tens = linearized(out.plan);
    tens.array() -= tens.minCoeff();  // shift does not change the Sinkhorn plan
    const SinkhornResult sk = Sinkhorn(tens, p, q, epsilon, 2000, 1e-10);
    const double change = (sk.plan - out.plan).norm();
    out.plan = sk.plan;
    out.iterations = it + 1;
    if (change < tol) {
      out.converged = true;
      break;
    }
  }
  out.value = std::max(0.0, linearized(out.plan).cwiseProduct(out.plan).sum());
  return out;
}

Matrix Subsample(const Matrix& points, Eigen::Index max_points, uint64_t seed) {
  if (points.cols() <= max_points) return points;
  std::vector<Eigen::Index> idx(static_cast<size_t>(points.cols()));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng = MakeRng(seed, "subsample");
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<size_t>(max_points));
  std::sort(idx.begin(), idx.end());
  Matrix out(points.rows(), max_points);
  for (Eigen::Index j = 0; j < max_points; ++j) out.col(j) = points.col(idx[static_cast<size_t>(j)]);
  return out;
}

}  // namespace cotrain
