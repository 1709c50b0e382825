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

#ifndef COTRAIN_SCHEDULE_H_
#define COTRAIN_SCHEDULE_H_

#include "cotrain/types.h"

namespace cotrain {

enum class ScheduleKind { kVpCosine };

// Variance-preserving forward corruption x_t = alpha_t x_0 + sigma_t eps with
// alpha_t = cos(pi t / 2), sigma_t = sin(pi t / 2) on [t_min, t_max].
//
// Both ends stay strictly inside (0, 1): sigma(t_min) > 0 keeps the score
// (alpha a - a_t) / sigma^2 finite, and alpha(t_max) > 0 keeps the data
// prediction (a_t + sigma^2 s) / alpha used by the reverse samplers finite.
struct NoiseSchedule {
  ScheduleKind kind = ScheduleKind::kVpCosine;
  double t_min = 1e-3;
  double t_max = 0.999;

  void Validate() const;
};

struct AlphaSigma {
  double alpha;
  double sigma;
};

// Throws std::domain_error naming t when t is outside [t_min, t_max].
AlphaSigma Coefficients(const NoiseSchedule& schedule, double t);

Vector Perturb(const NoiseSchedule& schedule, const Vector& x0, double t,
               const Vector& eps);

// Distance of a_t from the noise-shell centre alpha_t a_k in units of the
// typical shell radius sigma_t sqrt(d).
double ShellRadius(const NoiseSchedule& schedule, const Vector& a_t,
                   const Vector& a_k, double t);

}  // namespace cotrain

#endif  // COTRAIN_SCHEDULE_H_
