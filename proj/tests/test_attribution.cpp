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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "proprio/attribution.hpp"
#include "proprio/common.hpp"
#include "proprio/mlp.hpp"

namespace {

using namespace proprio;

Matrix gaussian(int rows, int cols, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = dist(gen);
  return m;
}

// Ordinary least squares on a feature subset; the oracle retrainer for
// the permutation-importance ranking.
double loo_mse(const Matrix& x, const Matrix& y, const std::vector<int>& keep) {
  Matrix xs(x.rows(), keep.size() + 1);
  for (size_t j = 0; j < keep.size(); ++j) xs.col(j) = x.col(keep[j]);
  xs.col(keep.size()).setOnes();
  Matrix beta = (xs.transpose() * xs).ldlt().solve(xs.transpose() * y);
  Matrix resid = xs * beta - y;
  return resid.squaredNorm() / (resid.rows() * resid.cols());
}

// Exact Shapley values for f and one background row by enumerating all
// 2^k coalitions (k small).
Vector exact_shapley(const std::function<double(const Vector&)>& f,
                     const Vector& x, const Vector& z) {
  const int k = static_cast<int>(x.size());
  std::vector<double> fact(k + 1, 1.0);
  for (int i = 1; i <= k; ++i) fact[i] = fact[i - 1] * i;
  Vector phi = Vector::Zero(k);
  for (int mask = 0; mask < (1 << k); ++mask) {
    Vector v = z;
    int size = 0;
    for (int j = 0; j < k; ++j) {
      if (mask & (1 << j)) {
        v(j) = x(j);
        ++size;
      }
    }
    const double base = f(v);
    for (int j = 0; j < k; ++j) {
      if (mask & (1 << j)) continue;
      Vector with = v;
      with(j) = x(j);
      const double weight = fact[size] * fact[k - size - 1] / fact[k];
      phi(j) += weight * (f(with) - base);
    }
  }
  return phi;
}

}  // namespace

TEST_CASE("permutation importance ranks a linear model like retraining does") {
  // Five independent channels with known weights; one carries nothing.
  const Vector w = (Vector(5) << 3.0, -2.0, 1.2, 0.7, 0.0).finished();
  Matrix x = gaussian(400, 5, 1);
  Matrix y = x * w;
  Predictor exact = [&w](const Matrix& q) -> Matrix { return q * w; };
  std::vector<int> features{0, 1, 2, 3, 4};
  ImportanceReport rep = permutation_importance(exact, x, y, features, 10, 5);
  REQUIRE(rep.scores.size() == 5);
  CHECK(rep.baseline_mse == doctest::Approx(0.0).scale(1).epsilon(1e-20));

  // Oracle: rank features by how much an OLS refit without each one loses.
  std::vector<double> loo(5);
  for (int drop = 0; drop < 5; ++drop) {
    std::vector<int> keep;
    for (int j = 0; j < 5; ++j) {
      if (j != drop) keep.push_back(j);
    }
    loo[drop] = loo_mse(x, y, keep);
  }
  std::vector<int> oracle{0, 1, 2, 3, 4};
  std::sort(oracle.begin(), oracle.end(),
            [&](int a, int b) { return loo[a] > loo[b]; });
  CHECK(rep.ranking == oracle);
  // The empty channel scores nothing at all.
  CHECK(std::abs(rep.scores[4]) <= 1e-12);
  CHECK(rep.scores[0] > rep.scores[1]);
}

TEST_CASE("permutation importance ignores features outside the request") {
  const Vector w = (Vector(4) << 1.0, 2.0, 0.5, -1.5).finished();
  Matrix x = gaussian(150, 4, 2);
  Matrix y = x * w;
  Predictor exact = [&w](const Matrix& q) -> Matrix { return q * w; };
  ImportanceReport rep = permutation_importance(exact, x, y, {1, 3}, 8, 9);
  REQUIRE(rep.features == std::vector<int>{1, 3});
  REQUIRE(rep.scores.size() == 2);
  CHECK(rep.ranking.front() == 1);  // |2.0| beats |-1.5|
  ImportanceReport again = permutation_importance(exact, x, y, {1, 3}, 8, 9);
  CHECK(rep.scores == again.scores);  // seeded shuffles reproduce
  ImportanceReport moved = permutation_importance(exact, x, y, {1, 3}, 8, 10);
  CHECK(rep.scores != moved.scores);
}

TEST_CASE("shapley values of a linear model are exact per permutation") {
  const Vector w = (Vector(6) << 2.0, -1.0, 0.5, 0.0, 3.0, -0.25).finished();
  Predictor linear = [&w](const Matrix& q) -> Matrix {
    Matrix out = q * w;
    return out;
  };
  Matrix eval = gaussian(4, 6, 3);
  Matrix background = gaussian(1, 6, 4);
  // With one background row, every permutation yields the same marginal
  // w_i * (x_i - z_i) for a linear model, so few permutations suffice.
  ShapValues values = shapley_values(linear, eval, background, 10, 11);
  REQUIRE(values.per_row.size() == 4);
  for (int r = 0; r < 4; ++r) {
    REQUIRE(values.per_row[r].rows() == 6);
    REQUIRE(values.per_row[r].cols() == 1);
    for (int j = 0; j < 6; ++j) {
      const double want = w(j) * (eval(r, j) - background(0, j));
      CHECK(values.per_row[r](j, 0) == doctest::Approx(want).epsilon(1e-10));
    }
  }
}

TEST_CASE("monte carlo shapley tracks exact enumeration on a nonlinear toy") {
  auto f = [](const Vector& v) {
    return v(0) * v(1) + 2.0 * v(2) + v(0) * v(2) * v(2) + std::sin(v(1));
  };
  Predictor batched = [&f](const Matrix& q) -> Matrix {
    Matrix out(q.rows(), 1);
    for (int r = 0; r < q.rows(); ++r) out(r, 0) = f(q.row(r).transpose());
    return out;
  };
  Matrix eval = gaussian(5, 3, 7);
  Matrix background = gaussian(1, 3, 8);
  // With 3 features there are only 6 distinct permutations, so the estimate
  // is a multinomial mix over 6 marginal patterns; 20000 draws push the
  // sampling noise (about 0.02 here) safely inside the 2 percent band.
  ShapValues mc = shapley_values(batched, eval, background, 20000, 13);
  for (int r = 0; r < 5; ++r) {
    Vector want = exact_shapley(f, eval.row(r).transpose(),
                                background.row(0).transpose());
    const double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(mc.per_row[r](j, 0) - want(j)) <= 0.02 * scale);
    }
  }
}

TEST_CASE("shapley efficiency: attributions sum to the prediction gap") {
  Mlp net = Mlp::init(std::vector<int>{8, 16, 8, 2}, 21);
  Predictor predict = predictor_of(net);
  Matrix eval = gaussian(50, 8, 31);
  Matrix background = gaussian(40, 8, 32);
  const int n_perms = 400;
  ShapValues values = shapley_values(predict, eval, background, n_perms, 17);
  Matrix f_eval = predict(eval);
  Matrix f_bg = predict(background);
  const Matrix bg_mean = f_bg.colwise().mean();
  // Per permutation the telescoping sum is exact, so the residual is only
  // background-sampling noise with standard error sd / sqrt(n_perms). With
  // 100 row-output pairs a hard 3 SE bound on each would flake about a
  // quarter of the time, so check statistically: nearly all residuals land
  // under 3 SE and every one of them under a generous 6 SE cap.
  int beyond_three_se = 0;
  for (int out = 0; out < 2; ++out) {
    const double sd = std::sqrt(
        (f_bg.col(out).array() - bg_mean(out)).square().sum() /
        (f_bg.rows() - 1));
    const double se = sd / std::sqrt(static_cast<double>(n_perms));
    for (int r = 0; r < eval.rows(); ++r) {
      const double total = values.per_row[r].col(out).sum();
      const double gap = f_eval(r, out) - bg_mean(out);
      if (std::abs(total - gap) > 3.0 * se + 1e-9) ++beyond_three_se;
      CHECK(std::abs(total - gap) <= 6.0 * se + 1e-9);
    }
  }
  CHECK(beyond_three_se <= 5);  // expected ~0.3 of 100 under the noise model
}

TEST_CASE("shapley dummy, symmetry, and linearity") {
  // Dummy: a feature the model never reads gets exactly zero.
  Predictor ignores2 = [](const Matrix& q) -> Matrix {
    Matrix out(q.rows(), 1);
    for (int r = 0; r < q.rows(); ++r) out(r, 0) = 3.0 * q(r, 0) - q(r, 1);
    return out;
  };
  Matrix eval = gaussian(3, 3, 41);
  Matrix background = gaussian(5, 3, 42);
  ShapValues v = shapley_values(ignores2, eval, background, 50, 19);
  for (int r = 0; r < 3; ++r) CHECK(v.per_row[r](2, 0) == 0.0);

  // Symmetry: interchangeable features with equal values split equally.
  Predictor sum2 = [](const Matrix& q) -> Matrix {
    Matrix out(q.rows(), 1);
    for (int r = 0; r < q.rows(); ++r) out(r, 0) = q(r, 0) + q(r, 1);
    return out;
  };
  Matrix eval_eq(1, 3);
  eval_eq << 0.8, 0.8, -0.3;
  Matrix bg_eq(1, 3);
  bg_eq << -0.1, -0.1, 0.4;
  ShapValues sym = shapley_values(sum2, eval_eq, bg_eq, 200, 23);
  CHECK(sym.per_row[0](0, 0) == doctest::Approx(sym.per_row[0](1, 0)));

  // Linearity: with the same seed the estimator is linear in the model.
  Predictor fa = [](const Matrix& q) -> Matrix {
    Matrix out(q.rows(), 1);
    for (int r = 0; r < q.rows(); ++r) out(r, 0) = q(r, 0) * q(r, 1);
    return out;
  };
  Predictor fb = [](const Matrix& q) -> Matrix {
    Matrix out(q.rows(), 1);
    for (int r = 0; r < q.rows(); ++r) out(r, 0) = q(r, 2) - 2.0 * q(r, 0);
    return out;
  };
  Predictor fab = [&](const Matrix& q) -> Matrix { return fa(q) + fb(q); };
  ShapValues va = shapley_values(fa, eval, background, 64, 29);
  ShapValues vb = shapley_values(fb, eval, background, 64, 29);
  ShapValues vab = shapley_values(fab, eval, background, 64, 29);
  for (int r = 0; r < 3; ++r) {
    CHECK((vab.per_row[r] - va.per_row[r] - vb.per_row[r])
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("aggregate_shap orders features and breaks ties by index") {
  ShapValues values;
  Matrix row1(4, 2);
  row1 << 1.0, -1.0,  // feature 0: |1|+|"-1| = 2
      0.5, 0.5,       // feature 1: 1
      -2.0, 0.0,      // feature 2: 2
      0.0, 0.1;       // feature 3: 0.1
  values.per_row.push_back(row1);
  ShapReport rep = aggregate_shap(values, 777);
  CHECK(rep.trial_seed == 777);
  REQUIRE(rep.aggregate.size() == 4);
  CHECK(rep.aggregate[0] == doctest::Approx(2.0));
  CHECK(rep.aggregate[2] == doctest::Approx(2.0));
  // 0 and 2 tie on 2.0; the lower index leads.
  CHECK(rep.top3[0] == 0);
  CHECK(rep.top3[1] == 2);
  CHECK(rep.top3[2] == 1);
}

TEST_CASE("ablation runs tiny problems deterministically") {
  // Synthetic 60-channel data with a linear teacher so it trains fast.
  Matrix x = gaussian(60, kNumSensors, 51);
  Matrix w = 0.05 * gaussian(kNumAxes, kNumSensors, 52);
  Matrix y = x * w.transpose();
  ModelData data;
  data.x_train = x.topRows(45);
  data.y_train = y.topRows(45);
  data.x_test = x.bottomRows(15);
  data.y_test = y.bottomRows(15);
  AblateOptions opts;
  opts.trial_seeds = {5, 6};
  opts.n_shuffles = 2;
  opts.train.epochs = 2;
  opts.train.batch_size = 16;
  int calls = 0;
  auto curves = ablate(data, opts, [&](int, int) { ++calls; });
  REQUIRE(curves.size() == 2);
  CHECK(calls > 0);
  for (const auto& curve : curves) {
    REQUIRE(curve.points.size() == kNumSensors);
    for (size_t k = 0; k < curve.points.size(); ++k) {
      CHECK(curve.points[k].ratio ==
            doctest::Approx(static_cast<double>(k) / kNumSensors));
      CHECK(curve.points[k].pitch_mean >= 0.0);
      CHECK(curve.points[k].pitch_max >= curve.points[k].pitch_mean);
      CHECK(curve.points[k].roll_max >= curve.points[k].roll_mean);
    }
  }
  CHECK(curves[0].trial_seed == 5);
  CHECK(curves[1].trial_seed == 6);
  auto rerun = ablate(data, opts);
  for (int trial = 0; trial < 2; ++trial) {
    for (size_t k = 0; k < curves[trial].points.size(); ++k) {
      CHECK(rerun[trial].points[k].pitch_mean ==
            curves[trial].points[k].pitch_mean);
    }
  }
  AblateOptions dup;
  dup.trial_seeds = {5, 5};
  CHECK_THROWS_AS(ablate(data, dup), ConfigError);
}
