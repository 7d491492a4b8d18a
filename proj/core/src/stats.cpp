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

#include "proprio/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace proprio {

namespace {

// Continued fraction for the incomplete beta function, modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-12;
  constexpr int kMaxIter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
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
  throw InvariantError("incomplete beta: continued fraction did not converge");
}

double sample_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v, double mean) {
  double ss = 0.0;
  for (double x : v) {
    const double d = x - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

ErrorStats error_stats(const Vector& predicted, const Vector& actual) {
  if (predicted.size() == 0 || predicted.size() != actual.size()) {
    throw ConfigError("error_stats: need equal-length nonempty sequences");
  }
  const Vector abs_err = (predicted - actual).cwiseAbs();
  ErrorStats s;
  s.max_err = abs_err.maxCoeff();
  s.mean_abs = abs_err.mean();
  const auto n = static_cast<double>(abs_err.size());
  if (abs_err.size() > 1) {
    s.std_abs = std::sqrt((abs_err.array() - s.mean_abs).square().sum() /
                          (n - 1.0));
  }
  return s;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw ConfigError("incomplete beta: a and b must be positive");
  }
  if (x < 0.0 || x > 1.0) {
    throw ConfigError("incomplete beta: x outside [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) {
    throw ConfigError("student_t_cdf: df must be positive");
  }
  if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

WelchResult welch_t_test(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) {
    throw ConfigError("welch_t_test: each sample needs at least 2 values");
  }
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  const double ma = sample_mean(a);
  const double mb = sample_mean(b);
  const double va = sample_variance(a, ma);
  const double vb = sample_variance(b, mb);

  WelchResult r;
  if (va == 0.0 && vb == 0.0) {
    r.df = na + nb - 2.0;
    if (ma == mb) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = ma > mb ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
      r.p = 0.0;
    }
    return r;
  }

  const double sa = va / na;
  const double sb = vb / nb;
  r.t = (ma - mb) / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) /
         (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  r.p = regularized_incomplete_beta(0.5 * r.df, 0.5,
                                    r.df / (r.df + r.t * r.t));
  return r;
}

HolmResult holm_correct(const std::vector<double>& p_values, double alpha) {
  const std::size_t m = p_values.size();
  for (double p : p_values) {
    if (!(p >= 0.0) || !(p <= 1.0)) {
      throw ConfigError("holm_correct: p-values must lie in [0, 1]");
    }
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return p_values[i] < p_values[j];
  });

  HolmResult r;
  r.adjusted.resize(m);
  r.significant.resize(m);
  double running = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double scaled =
        std::min(1.0, static_cast<double>(m - k) * p_values[order[k]]);
    running = std::max(running, scaled);
    r.adjusted[order[k]] = running;
  }
  for (std::size_t i = 0; i < m; ++i) {
    r.significant[i] = r.adjusted[i] < alpha;
  }
  return r;
}

std::vector<RatioTest> ratio_significance(
    const std::vector<AblationCurve>& curves, AblationMetric metric,
    AblationAxis axis, double alpha) {
  if (curves.size() < 2) {
    throw ConfigError("ratio_significance: need at least 2 trials");
  }
  std::map<double, std::vector<double>> by_ratio;
  for (const AblationCurve& curve : curves) {
    for (const AblationPoint& p : curve.points) {
      by_ratio[p.ratio].push_back(ablation_value(p, metric, axis));
    }
  }
  const auto baseline_it = by_ratio.find(0.0);
  if (baseline_it == by_ratio.end() ||
      baseline_it->second.size() != curves.size()) {
    throw ConfigError("ratio_significance: every curve needs a ratio-0 point");
  }
  const std::vector<double>& baseline = baseline_it->second;

  std::vector<RatioTest> tests;
  std::vector<double> raw_p;
  for (const auto& [ratio, values] : by_ratio) {
    if (ratio == 0.0) continue;
    if (values.size() != curves.size()) {
      throw ConfigError("ratio_significance: curves disagree on ratio grid");
    }
    RatioTest rt;
    rt.ratio = ratio;
    rt.welch = welch_t_test(values, baseline);
    tests.push_back(rt);
    raw_p.push_back(rt.welch.p);
  }

  const HolmResult holm = holm_correct(raw_p, alpha);
  for (std::size_t i = 0; i < tests.size(); ++i) {
    tests[i].adjusted_p = holm.adjusted[i];
    tests[i].significant = holm.significant[i];
  }
  return tests;
}

std::optional<double> first_significant_ratio(
    const std::vector<AblationCurve>& curves, AblationMetric metric,
    AblationAxis axis, double alpha) {
  for (const RatioTest& rt : ratio_significance(curves, metric, axis, alpha)) {
    if (rt.significant) return rt.ratio;  // map iteration is ratio-ascending
  }
  return std::nullopt;
}

}  // namespace proprio
