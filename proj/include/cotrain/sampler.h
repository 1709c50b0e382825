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

#ifndef COTRAIN_SAMPLER_H_
#define COTRAIN_SAMPLER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

#include "cotrain/oracle.h"
#include "cotrain/schedule.h"
#include "cotrain/types.h"

namespace cotrain {

enum class SamplerMode { kAncestralSde, kProbabilityFlowOde };

std::string_view SamplerModeName(SamplerMode mode);
SamplerMode ParseSamplerMode(std::string_view name);

struct SamplerConfig {
  SamplerMode mode = SamplerMode::kProbabilityFlowOde;
  int n_steps = 50;
  uint64_t seed = 0;
};

// Batched score function: column j of the result is the score at column j of
// `a_t`, all at the same time t.
using ScoreFn = std::function<Matrix(const Matrix& a_t, double t)>;

// (1 + lambda) s_cond - lambda s_uncond, no clipping.
Matrix CfgScore(const Matrix& s_cond, const Matrix& s_uncond, double lambda);

// Evaluates both branches and combines them with CfgScore.
ScoreFn GuidedScore(ScoreFn conditional, ScoreFn unconditional, double lambda);

// Adapts an oracle (optionally conditioned on one observation) to ScoreFn.
ScoreFn OracleScore(const MixtureOracle& oracle,
                    std::optional<Vector> z = std::nullopt);

// Draws `n_samples` columns of dimension `d_act` by reverse-time denoising on
// a uniform grid from t_max down to t_min.
//
// Every step forms the data prediction x0 = (x + sigma_t^2 s) / alpha_t and
// the noise prediction eps = -sigma_t s. The probability-flow mode then moves
// to x_s = alpha_s x0 + sigma_s eps (the Euler step of the flow written in
// data-prediction form); the ancestral mode draws from the Gaussian
// q(x_s | x_t, x0) of the forward process.
//
// Sample j owns the random stream (seed, "sampler", j), so results do not
// depend on n_samples or on how columns are batched. Throws NumericError
// naming the step and time when the score is not finite.
Matrix Sample(const ScoreFn& score, const NoiseSchedule& schedule,
              const SamplerConfig& config, Eigen::Index d_act,
              Eigen::Index n_samples);

}  // namespace cotrain

#endif  // COTRAIN_SAMPLER_H_
