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

#ifndef PROPRIO_ATTRIBUTION_HPP_
#define PROPRIO_ATTRIBUTION_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "proprio/ablation_curve.hpp"
#include "proprio/capsule.hpp"
#include "proprio/common.hpp"
#include "proprio/dataset.hpp"
#include "proprio/mlp.hpp"

namespace proprio {

// Any batch model: n x features in, n x outputs out. Lets the analyses run
// against toy closed-form models in tests as well as the trained net.
using Predictor = std::function<Matrix(const Matrix&)>;

Predictor predictor_of(const Mlp& model);

struct ImportanceReport {
  double baseline_mse = 0.0;
  std::vector<int> features;     // the evaluated feature set
  std::vector<double> scores;    // aligned with `features`
  std::vector<int> ranking;      // `features` sorted by descending score
  int n_shuffles = 10;
};

// Permutation importance: score = mean over n_shuffles seeded column
// shuffles of (test MSE with that feature's column permuted - baseline
// test MSE). Ranking ties break toward the lower feature index.
ImportanceReport permutation_importance(const Predictor& predict,
                                        const Matrix& x, const Matrix& y,
                                        const std::vector<int>& features,
                                        int n_shuffles, std::uint64_t seed);

struct AblateOptions {
  std::vector<std::uint64_t> trial_seeds;  // distinct, one per trial
  int n_shuffles = 10;
  TrainConfig train;
};

// The redundancy experiment. Per trial: train from a fresh init, record
// pitch/roll test errors, rank active features by permutation importance,
// deactivate the most important one (its standardized column is pinned to
// the training-set constant, keeping arity fixed), retrain; repeat until
// every feature has been removed, one reduction-ratio point per step.
std::vector<AblationCurve> ablate(
    const ModelData& data, const AblateOptions& options,
    const std::function<void(int, int)>& progress = {});

// Per-evaluation-row Shapley attributions; per_row[r] is features x outputs.
struct ShapValues {
  std::vector<Matrix> per_row;
};

// Monte-Carlo permutation estimator: for each evaluation row and sampled
// permutation, features flip one at a time from a seeded background row's
// value to the evaluation row's value; a feature's attribution is its mean
// output change over permutations.
ShapValues shapley_values(const Predictor& predict, const Matrix& eval_rows,
                          const Matrix& background, int n_permutations,
                          std::uint64_t seed);

struct ShapReport {
  std::uint64_t trial_seed = 0;
  std::vector<double> aggregate;  // per feature: mean over rows of
                                  // sum over outputs of |phi|
  std::array<int, 3> top3{};      // descending aggregate, ties by index
};

ShapReport aggregate_shap(const ShapValues& values, std::uint64_t trial_seed);

struct RegionCount {
  // Top-3 appearances per capsule row over all trials, in
  // (mid-capsular, transitional, bone-attachment) order.
  std::array<int, 3> rows{};
  std::array<int, kNumSensors> frequency{};  // per-feature appearances
  int most_frequent = 0;  // feature with the most appearances, ties by index
};

struct ShapOptions {
  std::vector<std::uint64_t> trial_seeds;  // distinct, one per trial
  int n_permutations = 200;
  int background_size = 100;
  double test_fraction = 0.20;
  TargetScale scale = TargetScale::kRadiansMeters;
  TrainConfig train;
};

struct NearLimitResult {
  NearLimit criterion = NearLimit::kTwist;
  std::vector<ShapReport> trials;
  RegionCount regions;
};

// The near-limit experiment: per trial, split the near-limit subset, train
// a fresh model on its training side, attribute its test side with Shapley
// values, and keep the top-3 features; then count capsule-row membership
// across trials.
NearLimitResult near_limit_attribution(
    const Records& records, const SensorLayout& layout, NearLimit criterion,
    const ShapOptions& options,
    const std::function<void(int)>& progress = {});

}  // namespace proprio

#endif  // PROPRIO_ATTRIBUTION_HPP_
