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

#include "cotrain/guideline.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cotrain/types.h"

namespace cotrain {
namespace {

void CheckCounts(long n, long m) {
  if (n < 1 || m < 1) throw ConfigError("dataset sizes N and M must be at least 1");
}

// Log of the per-sample weights A and B; kept in logs so large r_gap * d does
// not overflow.
void LogWeights(long n, long m, double r_gap, double d, double* log_a, double* log_b) {
  CheckCounts(n, m);
  if (!(d > 0.0)) throw ConfigError("dimension d must be positive");
  *log_a = 0.5 * r_gap * d - std::log(static_cast<double>(n));
  *log_b = -std::log(static_cast<double>(m));
}

}  // namespace

std::string_view GapSizeName(GapSize gap) { return gap == GapSize::kSmall ? "small" : "large"; }

GapSize ParseGapSize(std::string_view name) {
  if (name == "small") return GapSize::kSmall;
  if (name == "large") return GapSize::kLarge;
  throw ConfigError("unknown gap '" + std::string(name) + "' (expected small or large)");
}

void GuidelineInput::Validate() const {
  CheckCounts(n_target, m_source);
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("q must lie in (0, 1)");
}

double NaturalRatio(long n_target, long m_source) {
  if (n_target < 0 || m_source < 0 || n_target + m_source < 1) {
    throw ConfigError("natural ratio needs N, M >= 0 and N + M >= 1");
  }
  return static_cast<double>(n_target) / static_cast<double>(n_target + m_source);
}

double UpperRatio(long n_target, long m_source, double q) {
  CheckCounts(n_target, m_source);
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("q must lie in (0, 1)");
  const double n = static_cast<double>(n_target);
  const double m = static_cast<double>(m_source);
  if (m / n > 5.0) return std::sqrt(n / m);
  return n * q / ((1.0 - q) * m + n * q);
}

MixingRange RecommendRange(const GuidelineInput& input) {
  input.Validate();
  MixingRange r;
  r.w_n = NaturalRatio(input.n_target, input.m_source);
  r.w_q = UpperRatio(input.n_target, input.m_source, input.q);
  r.lo = r.w_n;
  r.hi = r.w_q;
  if (static_cast<double>(input.m_source) / static_cast<double>(input.n_target) > 5.0) {
    r.notes.push_back("M/N > 5: upper bound is sqrt(N/M)");
  } else {
    r.notes.push_back("M/N <= 5: upper bound from the desired target contribution q");
  }
  if (input.gap == GapSize::kLarge) {
    r.lo *= kLargeGapFactor;
    r.hi *= kLargeGapFactor;
    r.notes.push_back("large domain gap: both bounds scaled by 1.5 (heuristic)");
  }
  if (input.cap_half && r.hi > 0.5) {
    r.hi = 0.5;
    r.notes.push_back("upper bound capped at 0.5");
  }
  if (r.hi > kMaxUpper) {
    r.hi = kMaxUpper;
    r.notes.push_back("upper bound clamped to 0.99");
  }
  if (r.lo > r.hi) {
    r.lo = r.hi;
  }
  if (r.lo >= r.hi) {
    r.degenerate = true;
    r.notes.push_back("degenerate range: lower bound reaches the upper bound");
  }
  return r;
}

nlohmann::json MixingRangeToJson(const MixingRange& r) {
  return {{"w_n", r.w_n},
          {"w_q", r.w_q},
          {"range", {r.lo, r.hi}},
          {"degenerate", r.degenerate},
          {"notes", r.notes}};
}

double TargetShare(double w, long n_target, long m_source, double r_gap, double d) {
  if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("w must lie in [0, 1]");
  double log_a = 0.0, log_b = 0.0;
  LogWeights(n_target, m_source, r_gap, d, &log_a, &log_b);
  if (w == 0.0) return 0.0;
  if (w == 1.0) return 1.0;
  const double e = std::exp(0.5 * r_gap * d);
  if (std::isfinite(e) && e > 0.0) {
    // M w e / (M w e + N (1 - w)): exact 1/2 at w = N / (N + M), r_gap = 0.
    const double num = static_cast<double>(m_source) * w * e;
    return num / (num + static_cast<double>(n_target) * (1.0 - w));
  }
  const double log_odds = log_a + std::log(w) - log_b - std::log1p(-w);
  return 1.0 / (1.0 + std::exp(-log_odds));
}

std::vector<ReweightRow> ReweightCurve(long n_target, long m_source,
                                       const std::vector<double>& w_grid,
                                       double r_gap, double d) {
  std::vector<ReweightRow> rows;
  rows.reserve(w_grid.size());
  for (double w : w_grid) {
    ReweightRow row;
    row.w = w;
    row.g_r = TargetShare(w, n_target, m_source, r_gap, d);
    row.g_s = 1.0 - row.g_r;
    if (w == 1.0) {
      row.ratio = std::numeric_limits<double>::infinity();
    } else {
      double log_a = 0.0, log_b = 0.0;
      LogWeights(n_target, m_source, r_gap, d, &log_a, &log_b);
      row.ratio = w == 0.0 ? 0.0 : std::exp(log_a + std::log(w) - log_b - std::log1p(-w));
    }
    rows.push_back(row);
  }
  return rows;
}

double DiagonalIntersection(long n_target, long m_source, double r_gap, double d) {
  // f(w) = g_r(w) - (1 - w) is strictly increasing with f(0) = -1, f(1) = 1.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (TargetShare(mid, n_target, m_source, r_gap, d) - (1.0 - mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double MaxSlope(long n_target, long m_source, double r_gap, double d) {
  double log_a = 0.0, log_b = 0.0;
  LogWeights(n_target, m_source, r_gap, d, &log_a, &log_b);
  return std::exp(std::abs(log_a - log_b));
}

}  // namespace cotrain
