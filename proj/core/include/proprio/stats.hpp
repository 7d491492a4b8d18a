/*
 * Copyright 2026 The Proprio Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PROPRIO_STATS_HPP_
#define PROPRIO_STATS_HPP_

#include <optional>
#include <vector>

#include "proprio/ablation_curve.hpp"
#include "proprio/common.hpp"

namespace proprio {

// Summary of absolute errors |predicted - actual|: maximum, mean, and
// sample standard deviation (n-1 divisor; zero for a single sample).
struct ErrorStats {
  double max_err = 0.0;
  double mean_abs = 0.0;
  double std_abs = 0.0;
};

ErrorStats error_stats(const Vector& predicted, const Vector& actual);

// CDF of Student's t distribution with real-valued df, evaluated through
// the regularized incomplete beta function (continued fraction, 1e-12
// termination).
double student_t_cdf(double t, double df);

// Regularized incomplete beta I_x(a, b). Exposed for oracle tests.
double regularized_incomplete_beta(double a, double b, double x);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of
// freedom. Requires both samples to hold at least 2 values. When both
// variances are zero: equal means give (t=0, p=1) by convention, unequal
// means give t = +-inf, p = 0.
WelchResult welch_t_test(const std::vector<double>& a,
                         const std::vector<double>& b);

struct HolmResult {
  std::vector<double> adjusted;    // in original order
  std::vector<bool> significant;   // adjusted < alpha
};

// Holm step-down correction: adjusted p at ascending rank k (1-based, m
// total) is max over j <= k of min(1, (m-j+1) * p_(j)).
HolmResult holm_correct(const std::vector<double>& p_values,
                        double alpha = 0.05);

struct RatioTest {
  double ratio = 0.0;
  WelchResult welch;
  double adjusted_p = 1.0;
  bool significant = false;
};

// For one (metric, axis) family: Welch-test the across-trial values at each
// nonzero reduction ratio against the ratio-0 baseline, Holm-correct within
// the family. Needs >= 2 curves, each with a ratio-0 point.
std::vector<RatioTest> ratio_significance(
    const std::vector<AblationCurve>& curves, AblationMetric metric,
    AblationAxis axis, double alpha = 0.05);

// Smallest reduction ratio flagged significant against the baseline,
// or nullopt when none is.
std::optional<double> first_significant_ratio(
    const std::vector<AblationCurve>& curves, AblationMetric metric,
    AblationAxis axis, double alpha = 0.05);

}  // namespace proprio

#endif  // PROPRIO_STATS_HPP_
