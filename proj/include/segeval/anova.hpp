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

/// \file anova.hpp
/// Standard (equal-variance) one-way ANOVA with exact F tail probabilities,
/// and five-number summaries for boxplots.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace segeval {

struct GroupSample {
  std::string label;
  std::vector<double> values;
};

struct AnovaTable {
  double ss_between = 0.0;
  double ss_within = 0.0;
  double ss_total = 0.0;  ///< computed directly about the grand mean
  long df_between = 0;
  long df_within = 0;
  long df_total = 0;
  double ms_between = 0.0;
  double ms_within = 0.0;
  double f = 0.0;
  double p = 1.0;
  std::vector<std::string> labels;
};

/// Throws TooFewGroups (< 2 groups), DegenerateData (N <= k or zero
/// within-group variance) and InvalidArgument (empty group, non-finite value).
AnovaTable one_way_anova(std::span<const GroupSample> groups);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// F(d1, d2) cumulative distribution.
double f_cdf(double x, long d1, long d2);

/// Upper tail 1 - f_cdf, evaluated directly so tiny p-values keep precision.
double f_sf(double x, long d1, long d2);

struct GroupSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;        ///< n-1 denominator; 0 when n == 1
  bool sd_defined = false;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Quartiles interpolate linearly between order statistics at p*(n-1).
GroupSummary group_summary(std::span<const double> values);

double quantile_sorted(std::span<const double> sorted, double p);

}  // namespace segeval
