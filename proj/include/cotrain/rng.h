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

#ifndef COTRAIN_RNG_H_
#define COTRAIN_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

#include "cotrain/types.h"

namespace cotrain {

// All randomness in the project comes from mt19937_64 engines whose seeds are
// derived as splitmix64(seed, fnv1a(tag), index). Streams for different
// purposes (data, init, batches, sampler chains, ...) never share state, so
// running work in parallel or adding a new consumer does not reorder draws
// of existing ones.
using Rng = std::mt19937_64;

uint64_t DeriveSeed(uint64_t seed, std::string_view tag, uint64_t index = 0);

inline Rng MakeRng(uint64_t seed, std::string_view tag, uint64_t index = 0) {
  return Rng(DeriveSeed(seed, tag, index));
}

inline double Uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double Normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

// Fills a rows x cols matrix with independent standard normals (column-major
// draw order).
Matrix NormalMatrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);

}  // namespace cotrain

#endif  // COTRAIN_RNG_H_
