// Copyright 2026 The segeval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "segeval/anova.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "segeval/error.hpp"

namespace segeval {

namespace {

// Sum/n plus one residual pass; a constant sample returns its value exactly.
double mean_of(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double m = sum / n;
  double residual = 0.0;
  for (const double v : values) residual += v - m;
  return m + residual / n;
}

// Continued fraction for I_x(a,b), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0))
    throw Error(ErrorCode::InvalidArgument, "incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_cdf(double x, long d1, long d2) {
  if (d1 < 1 || d2 < 1) throw Error(ErrorCode::InvalidArgument, "F degrees of freedom must be >= 1");
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double u = static_cast<double>(d1) * x;
  return incomplete_beta(0.5 * d1, 0.5 * d2, u / (u + static_cast<double>(d2)));
}

double f_sf(double x, long d1, long d2) {
  if (d1 < 1 || d2 < 1) throw Error(ErrorCode::InvalidArgument, "F degrees of freedom must be >= 1");
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double u = static_cast<double>(d1) * x;
  return incomplete_beta(0.5 * d2, 0.5 * d1, static_cast<double>(d2) / (u + static_cast<double>(d2)));
}

AnovaTable one_way_anova(std::span<const GroupSample> groups) {
  if (groups.size() < 2)
    throw Error(ErrorCode::TooFewGroups,
                "ANOVA needs at least two groups, got " + std::to_string(groups.size()));
  std::size_t n_total = 0;
  double sum = 0.0;
  double scale = 0.0;
  for (const auto& g : groups) {
    if (g.values.empty())
      throw Error(ErrorCode::InvalidArgument, "group '" + g.label + "' is empty");
    for (const double v : g.values) {
      if (!std::isfinite(v))
        throw Error(ErrorCode::InvalidArgument, "group '" + g.label + "' has a non-finite value");
      sum += v;
      scale = std::max(scale, std::abs(v));
    }
    n_total += g.values.size();
  }
  const std::size_t k = groups.size();
  if (n_total <= k)
    throw Error(ErrorCode::DegenerateData, "ANOVA needs more observations than groups");
  double grand = sum / static_cast<double>(n_total);
  double residual = 0.0;
  for (const auto& g : groups)
    for (const double v : g.values) residual += v - grand;
  grand += residual / static_cast<double>(n_total);

  AnovaTable t;
  for (const auto& g : groups) {
    const double mean = mean_of(g.values);
    for (const double v : g.values) {
      t.ss_within += (v - mean) * (v - mean);
      t.ss_total += (v - grand) * (v - grand);
    }
    t.ss_between += static_cast<double>(g.values.size()) * (mean - grand) * (mean - grand);
    t.labels.push_back(g.label);
  }
  t.df_between = static_cast<long>(k) - 1;
  t.df_within = static_cast<long>(n_total - k);
  t.df_total = static_cast<long>(n_total) - 1;
  t.ms_between = t.ss_between / static_cast<double>(t.df_between);
  t.ms_within = t.ss_within / static_cast<double>(t.df_within);
  // Residual variance indistinguishable from rounding noise counts as zero.
  const double noise = 1e-24 * scale * scale * static_cast<double>(n_total);
  if (t.ss_within <= noise)
    throw Error(ErrorCode::DegenerateData, "zero within-group variance");
  t.f = t.ms_between / t.ms_within;
  t.p = f_sf(t.f, t.df_between, t.df_within);
  return t;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty sample");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

GroupSummary group_summary(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "summary of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  GroupSummary s;
  s.n = sorted.size();
  s.mean = mean_of(values);
  if (s.n > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    s.sd_defined = true;
  }
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = quantile_sorted(sorted, 0.25);
  s.median = quantile_sorted(sorted, 0.5);
  s.q3 = quantile_sorted(sorted, 0.75);
  return s;
}

}  // namespace segeval
