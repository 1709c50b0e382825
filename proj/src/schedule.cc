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

#include "cotrain/schedule.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cotrain {

void NoiseSchedule::Validate() const {
  if (!(t_min > 0.0 && t_min < 1.0 && t_max <= 1.0 && t_min < t_max)) {
    std::ostringstream msg;
    msg << "invalid noise schedule range [" << t_min << ", " << t_max << "]";
    throw ConfigError(msg.str());
  }
}

AlphaSigma Coefficients(const NoiseSchedule& schedule, double t) {
  if (!(t >= schedule.t_min && t <= schedule.t_max)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "time " << t << " outside schedule range [" << schedule.t_min
        << ", " << schedule.t_max << "]";
    throw std::domain_error(msg.str());
  }
  const double angle = 0.5 * std::numbers::pi * t;
  return {std::cos(angle), std::sin(angle)};
}

Vector Perturb(const NoiseSchedule& schedule, const Vector& x0, double t,
               const Vector& eps) {
  CheckSameSize(x0.size(), eps.size(), "Perturb");
  const AlphaSigma c = Coefficients(schedule, t);
  return c.alpha * x0 + c.sigma * eps;
}

double ShellRadius(const NoiseSchedule& schedule, const Vector& a_t,
                   const Vector& a_k, double t) {
  CheckSameSize(a_t.size(), a_k.size(), "ShellRadius");
  if (a_t.size() == 0) throw ShapeError("ShellRadius: empty vectors");
  const AlphaSigma c = Coefficients(schedule, t);
  const double d = static_cast<double>(a_t.size());
  return (a_t - c.alpha * a_k).norm() / (c.sigma * std::sqrt(d));
}

}  // namespace cotrain
