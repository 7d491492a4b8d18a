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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "proprio/ablation_curve.hpp"
#include "proprio/common.hpp"
#include "proprio/stats.hpp"

namespace {

using namespace proprio;

// Student-t density, used to check the CDF against direct quadrature.
double t_pdf(double x, double df) {
  const double c = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                   0.5 * std::log(df * kPi);
  return std::exp(c - 0.5 * (df + 1.0) * std::log1p(x * x / df));
}

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(double a, double b, double fa, double fm, double fb,
                double whole, double tol, double df, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = t_pdf(lm, df);
  const double frm = t_pdf(rm, df);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive(a, m, fa, flm, fm, left, tol / 2.0, df, depth - 1) +
         adaptive(m, b, fm, frm, fb, right, tol / 2.0, df, depth - 1);
}

// CDF(t) = 1/2 + integral of the density from 0 to t. The integrand is
// smooth and bounded, so adaptive Simpson gets ~1e-12 easily.
double t_cdf_quadrature(double t, double df) {
  if (t == 0.0) return 0.5;
  const double a = 0.0;
  const double b = t;
  const double fa = t_pdf(a, df);
  const double fb = t_pdf(b, df);
  const double fm = t_pdf(0.5 * (a + b), df);
  const double whole = simpson(a, b, fa, fm, fb);
  return 0.5 + adaptive(a, b, fa, fm, fb, whole, 1e-13, df, 40);
}

}  // namespace

TEST_CASE("error_stats on a hand-worked fixture") {
  Matrix pred(3, 1), act(3, 1);
  pred << 1.0, 2.0, 3.0;
  act << 2.0, 1.0, 5.0;
  // abs errors 1, 1, 2: mean 4/3, sample std sqrt(1/3).
  ErrorStats s = error_stats(pred.col(0), act.col(0));
  CHECK(s.max_err == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.mean_abs == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(s.std_abs == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("error_stats single sample has zero std") {
  Matrix pred(1, 1), act(1, 1);
  pred << 2.5;
  act << 1.0;
  ErrorStats s = error_stats(pred.col(0), act.col(0));
  CHECK(s.max_err == doctest::Approx(1.5));
  CHECK(s.std_abs == 0.0);
}

TEST_CASE("welch t test matches the textbook fixture") {
  std::vector<double> a{1, 2, 3, 4, 5};
  std::vector<double> b{2, 3, 4, 5, 6};
  WelchResult r = welch_t_test(a, b);
  // Equal variances, shifted mean: t = -1, df = 8. Two-sided p from the
  // t distribution with 8 dof.
  CHECK(r.t == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r.df == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(r.p == doctest::Approx(0.3466).epsilon(1e-3));
  const double p_oracle = 2.0 * t_cdf_quadrature(-1.0, 8.0);
  CHECK(r.p == doctest::Approx(p_oracle).epsilon(1e-9));
}

TEST_CASE("welch t test is antisymmetric and sane") {
  std::vector<double> a{3.1, 2.7, 3.3, 2.9};
  std::vector<double> b{5.4, 5.9, 6.1, 5.2, 5.6};
  WelchResult ab = welch_t_test(a, b);
  WelchResult ba = welch_t_test(b, a);
  CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-14));
  CHECK(ab.df == doctest::Approx(ba.df).epsilon(1e-14));
  CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-14));
  CHECK(ab.p < 0.01);  // groups are far apart
  WelchResult same = welch_t_test(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == doctest::Approx(1.0));
}

TEST_CASE("welch t test degenerate variance conventions") {
  std::vector<double> flat{2.0, 2.0, 2.0};
  std::vector<double> flat2{2.0, 2.0};
  WelchResult eq = welch_t_test(flat, flat2);
  CHECK(eq.t == 0.0);
  CHECK(eq.p == 1.0);
  std::vector<double> other{3.0, 3.0, 3.0};
  WelchResult ne = welch_t_test(flat, other);
  CHECK(std::isinf(ne.t));
  CHECK(ne.t < 0.0);
  CHECK(ne.p == 0.0);
  CHECK_THROWS_AS(welch_t_test({1.0}, flat), ConfigError);
}

TEST_CASE("t cdf against adaptive Simpson quadrature") {
  const double dfs[] = {1.0, 2.5, 8.0, 30.0};
  const double ts[] = {-10.0, -5.0, -2.5, -1.0, -0.3, 0.0,
                       0.7,   1.0,  3.2,  10.0};
  for (double df : dfs) {
    for (double t : ts) {
      const double got = student_t_cdf(t, df);
      const double want = t_cdf_quadrature(t, df);
      CAPTURE(df);
      CAPTURE(t);
      CHECK(std::abs(got - want) < 1e-8);
    }
  }
}

TEST_CASE("t cdf closed forms at df 1 and 2") {
  for (double t : {-7.0, -1.3, 0.0, 0.4, 2.2, 9.0}) {
    const double cauchy = 0.5 + std::atan(t) / kPi;
    CHECK(student_t_cdf(t, 1.0) == doctest::Approx(cauchy).epsilon(1e-12));
    const double df2 = 0.5 + t / (2.0 * std::sqrt(2.0 + t * t));
    CHECK(student_t_cdf(t, 2.0) == doctest::Approx(df2).epsilon(1e-12));
  }
}

TEST_CASE("t cdf symmetry and monotonicity") {
  for (double df : {1.0, 4.0, 17.5}) {
    double prev = -1.0;
    for (double t = -8.0; t <= 8.0; t += 0.25) {
      const double c = student_t_cdf(t, df);
      CHECK(c > prev);
      prev = c;
      CHECK(c + student_t_cdf(-t, df) == doctest::Approx(1.0).epsilon(1e-13));
    }
    CHECK(student_t_cdf(0.0, df) == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("regularized incomplete beta closed forms") {
  for (double x : {0.05, 0.3, 0.5, 0.77, 0.99}) {
    CHECK(regularized_incomplete_beta(1.0, 1.0, x) ==
          doctest::Approx(x).epsilon(1e-13));
    // I_x(a, 1) = x^a and I_x(1, b) = 1 - (1-x)^b.
    CHECK(regularized_incomplete_beta(2.5, 1.0, x) ==
          doctest::Approx(std::pow(x, 2.5)).epsilon(1e-12));
    CHECK(regularized_incomplete_beta(1.0, 3.0, x) ==
          doctest::Approx(1.0 - std::pow(1.0 - x, 3.0)).epsilon(1e-12));
    // Reflection identity.
    CHECK(regularized_incomplete_beta(2.0, 5.0, x) ==
          doctest::Approx(1.0 - regularized_incomplete_beta(5.0, 2.0, 1.0 - x))
              .epsilon(1e-12));
  }
  CHECK(regularized_incomplete_beta(3.0, 4.0, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(3.0, 4.0, 1.0) == 1.0);
}

TEST_CASE("holm correction on the worked triple") {
  HolmResult r = holm_correct({0.01, 0.04, 0.03});
  REQUIRE(r.adjusted.size() == 3);
  CHECK(r.adjusted[0] == doctest::Approx(0.03).epsilon(1e-15));
  CHECK(r.adjusted[1] == doctest::Approx(0.06).epsilon(1e-15));
  CHECK(r.adjusted[2] == doctest::Approx(0.06).epsilon(1e-15));
  CHECK(r.significant == std::vector<bool>{true, false, false});
}

TEST_CASE("holm correction caps at one and keeps order stable") {
  HolmResult r = holm_correct({0.9, 0.6, 0.8});
  for (double p : r.adjusted) CHECK(p <= 1.0);
  // Step-down monotonicity: adjusted values sorted by raw p never decrease.
  HolmResult m = holm_correct({0.001, 0.01, 0.02, 0.2});
  CHECK(m.adjusted[0] <= m.adjusted[1]);
  CHECK(m.adjusted[1] <= m.adjusted[2]);
  CHECK(m.adjusted[2] <= m.adjusted[3]);
  HolmResult single = holm_correct({0.04});
  CHECK(single.adjusted[0] == doctest::Approx(0.04));
  CHECK(single.significant[0]);
  HolmResult none = holm_correct({});
  CHECK(none.adjusted.empty());
}

namespace {

// Synthetic ablation curves: flat at `base` until `knee`, then a large jump.
// Trial-to-trial scatter is small so significance is unambiguous.
std::vector<AblationCurve> fake_curves(double knee, double jump) {
  std::vector<AblationCurve> curves;
  for (int trial = 0; trial < 5; ++trial) {
    AblationCurve c;
    c.trial_seed = 100 + trial;
    for (int k = 0; k < 60; ++k) {
      AblationPoint p;
      p.ratio = k / 60.0;
      const double wiggle = 0.01 * ((trial * 7 + k) % 5 - 2);
      const double v =
          (p.ratio >= knee ? jump : 1.0) + wiggle;
      p.pitch_mean = v;
      p.pitch_max = 2.0 * v;
      p.roll_mean = 0.5 * v;
      p.roll_max = v;
      c.points.push_back(p);
    }
    curves.push_back(c);
  }
  return curves;
}

}  // namespace

TEST_CASE("ratio significance finds the knee") {
  auto curves = fake_curves(0.5, 8.0);
  auto first = first_significant_ratio(curves, AblationMetric::kMean,
                                       AblationAxis::kPitch, 0.05);
  REQUIRE(first.has_value());
  CHECK(*first == doctest::Approx(0.5).epsilon(1e-12));
  // Flat curves: nothing ever separates from the baseline.
  auto flat = fake_curves(2.0, 1.0);
  auto none = first_significant_ratio(flat, AblationMetric::kMean,
                                      AblationAxis::kPitch, 0.05);
  CHECK_FALSE(none.has_value());
}

TEST_CASE("ratio significance covers all metric and axis combinations") {
  auto curves = fake_curves(0.35, 12.0);
  for (auto metric : {AblationMetric::kMean, AblationMetric::kMax}) {
    for (auto axis : {AblationAxis::kPitch, AblationAxis::kRoll}) {
      auto first = first_significant_ratio(curves, metric, axis, 0.05);
      REQUIRE(first.has_value());
      CHECK(*first == doctest::Approx(0.35).epsilon(0.02));
    }
  }
}
