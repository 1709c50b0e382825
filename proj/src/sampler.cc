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

#include "cotrain/sampler.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cotrain/rng.h"

namespace cotrain {

std::string_view SamplerModeName(SamplerMode mode) {
  return mode == SamplerMode::kAncestralSde ? "ancestral-sde"
                                            : "probability-flow-ode";
}

SamplerMode ParseSamplerMode(std::string_view name) {
  if (name == "ancestral-sde" || name == "sde") return SamplerMode::kAncestralSde;
  if (name == "probability-flow-ode" || name == "ode") {
    return SamplerMode::kProbabilityFlowOde;
  }
  throw ConfigError("unknown sampler mode '" + std::string(name) + "'");
}

Matrix CfgScore(const Matrix& s_cond, const Matrix& s_uncond, double lambda) {
  if (s_cond.rows() != s_uncond.rows() || s_cond.cols() != s_uncond.cols()) {
    throw ShapeError("CfgScore: conditional and unconditional shapes differ");
  }
  return (1.0 + lambda) * s_cond - lambda * s_uncond;
}

ScoreFn GuidedScore(ScoreFn conditional, ScoreFn unconditional,
                    double lambda) {
  return [cond = std::move(conditional), uncond = std::move(unconditional),
          lambda](const Matrix& a_t, double t) {
    return CfgScore(cond(a_t, t), uncond(a_t, t), lambda);
  };
}

ScoreFn OracleScore(const MixtureOracle& oracle, std::optional<Vector> z) {
  return [&oracle, z = std::move(z)](const Matrix& a_t, double t) {
    Matrix out(a_t.rows(), a_t.cols());
    for (Eigen::Index j = 0; j < a_t.cols(); ++j) {
      out.col(j) = oracle.Score(a_t.col(j), t, z);
    }
    return out;
  };
}

Matrix Sample(const ScoreFn& score, const NoiseSchedule& schedule,
              const SamplerConfig& config, Eigen::Index d_act,
              Eigen::Index n_samples) {
  schedule.Validate();
  if (config.n_steps < 1) throw ConfigError("sampler needs n_steps >= 1");
  if (d_act < 1 || n_samples < 0) throw ShapeError("Sample: bad output shape");

  std::vector<Rng> streams;
  streams.reserve(static_cast<size_t>(n_samples));
  Matrix x(d_act, n_samples);
  for (Eigen::Index j = 0; j < n_samples; ++j) {
    streams.push_back(MakeRng(config.seed, "sampler", static_cast<uint64_t>(j)));
    for (Eigen::Index i = 0; i < d_act; ++i) x(i, j) = Normal(streams.back());
  }
  if (n_samples == 0) return x;

  const double dt = (schedule.t_max - schedule.t_min) / config.n_steps;
  for (int step = 0; step < config.n_steps; ++step) {
    const double t = schedule.t_max - step * dt;
    const double s = step + 1 == config.n_steps ? schedule.t_min
                                                : schedule.t_max - (step + 1) * dt;
    const AlphaSigma ct = Coefficients(schedule, t);
    const AlphaSigma cs = Coefficients(schedule, s);

    const Matrix sc = score(x, t);
    if (sc.rows() != d_act || sc.cols() != n_samples) {
      throw ShapeError("score function returned the wrong shape");
    }
    if (!sc.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite score at step " << step << " (t=" << t << ")";
      throw NumericError(msg.str());
    }
    const Matrix x0 = (x + (ct.sigma * ct.sigma) * sc) / ct.alpha;
    if (config.mode == SamplerMode::kProbabilityFlowOde) {
      const Matrix eps = -ct.sigma * sc;
      x = cs.alpha * x0 + cs.sigma * eps;
    } else {
      const double alpha_ts = ct.alpha / cs.alpha;
      const double var_ts = ct.sigma * ct.sigma - alpha_ts * alpha_ts * cs.sigma * cs.sigma;
      const double inv_var_t = 1.0 / (ct.sigma * ct.sigma);
      const double coef_x = alpha_ts * cs.sigma * cs.sigma * inv_var_t;
      const double coef_x0 = cs.alpha * var_ts * inv_var_t;
      const double stddev = std::sqrt(std::max(0.0, var_ts * cs.sigma * cs.sigma * inv_var_t));
      x = coef_x * x + coef_x0 * x0;
      for (Eigen::Index j = 0; j < n_samples; ++j) {
        for (Eigen::Index i = 0; i < d_act; ++i) {
          x(i, j) += stddev * Normal(streams[static_cast<size_t>(j)]);
        }
      }
    }
  }
  return x;
}

}  // namespace cotrain
