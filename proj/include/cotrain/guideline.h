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

// Mixing-ratio selection for co-training a small target set (N samples)
// with a large source set (M samples).

#ifndef COTRAIN_GUIDELINE_H_
#define COTRAIN_GUIDELINE_H_

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace cotrain {

enum class GapSize { kSmall, kLarge };
std::string_view GapSizeName(GapSize gap);
GapSize ParseGapSize(std::string_view name);

struct GuidelineInput {
  long n_target = 0;  // N
  long m_source = 0;  // M
  double q = 0.8;
  GapSize gap = GapSize::kSmall;
  bool cap_half = false;  // cap the upper bound at 0.5

  void Validate() const;
};

// w_n = N / (N + M), what plain concatenation of the datasets gives.
double NaturalRatio(long n_target, long m_source);

// sqrt(N / M) when M / N > 5, else N q / ((1 - q) M + N q).
double UpperRatio(long n_target, long m_source, double q);

// Multiplicative upward adjustment of both bounds for a large domain gap.
inline constexpr double kLargeGapFactor = 1.5;
// Upper bounds are clamped to stay below 1.
inline constexpr double kMaxUpper = 0.99;

struct MixingRange {
  double w_n = 0.0;
  double w_q = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool degenerate = false;  // lo >= hi after adjustment and clamping
  std::vector<std::string> notes;
};

MixingRange RecommendRange(const GuidelineInput& input);
nlohmann::json MixingRangeToJson(const MixingRange& range);

struct ReweightRow {
  double w = 0.0;
  double g_r = 0.0;  // target share of the posterior weight
  double g_s = 0.0;
  double ratio = 0.0;  // g_r / g_s, +inf at w = 1
};

// Target share of the posterior weight when the nearest target and source
// points sit at normalized shell radii with r_s^2 - r_t^2 = r_gap:
//   g_r(w) = A w / (A w + B (1 - w)),  A = exp(r_gap d / 2) / N,  B = 1 / M.
double TargetShare(double w, long n_target, long m_source, double r_gap, double d);

std::vector<ReweightRow> ReweightCurve(long n_target, long m_source,
                                       const std::vector<double>& w_grid,
                                       double r_gap, double d);

// Root of g_r(w) = 1 - w by bisection. With r_gap = 0 this is
// sqrt(q) / (sqrt(q) + 1), q = N / M.
double DiagonalIntersection(long n_target, long m_source, double r_gap, double d);

// max_w dg_r/dw = max(A, B) / min(A, B), attained at an endpoint.
double MaxSlope(long n_target, long m_source, double r_gap, double d);

}  // namespace cotrain

#endif  // COTRAIN_GUIDELINE_H_
