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

#include "proprio/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "proprio/rng.hpp"

namespace proprio {

namespace {

constexpr std::uint64_t kShuffleTag = 0x9e37u;
constexpr std::uint64_t kAblateStepTag = 0xab1au;
constexpr std::uint64_t kShapPermTag = 0x54a9u;
constexpr std::uint64_t kShapBackTag = 0xb4c9u;
constexpr std::uint64_t kNearTag = 0x6ea8u;

void check_distinct_seeds(const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) {
    throw ConfigError("need at least one trial seed");
  }
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) {
    throw ConfigError("trial seeds must be distinct");
  }
}

}  // namespace

Predictor predictor_of(const Mlp& model) {
  return [&model](const Matrix& x) { return model.forward(x); };
}

ImportanceReport permutation_importance(const Predictor& predict,
                                        const Matrix& x, const Matrix& y,
                                        const std::vector<int>& features,
                                        int n_shuffles, std::uint64_t seed) {
  if (x.rows() < 2) {
    throw ConfigError("permutation importance: need at least 2 rows");
  }
  if (n_shuffles < 1) {
    throw ConfigError("permutation importance: need at least 1 shuffle");
  }
  for (int f : features) {
    if (f < 0 || f >= x.cols()) {
      throw ConfigError("permutation importance: feature index out of range");
    }
  }

  ImportanceReport report;
  report.features = features;
  report.n_shuffles = n_shuffles;
  report.baseline_mse = mse_loss(predict(x), y);

  const auto n = static_cast<std::size_t>(x.rows());
  Matrix shuffled = x;
  for (int f : features) {
    double total = 0.0;
    for (int s = 0; s < n_shuffles; ++s) {
      const std::vector<std::size_t> perm = rng::shuffled_indices(
          n, rng::mix(seed, kShuffleTag, static_cast<std::uint64_t>(f),
                      static_cast<std::uint64_t>(s)));
      for (std::size_t i = 0; i < n; ++i) {
        shuffled(static_cast<Eigen::Index>(i), f) =
            x(static_cast<Eigen::Index>(perm[i]), f);
      }
      total += mse_loss(predict(shuffled), y);
    }
    shuffled.col(f) = x.col(f);
    report.scores.push_back(total / n_shuffles - report.baseline_mse);
  }

  report.ranking = features;
  std::sort(report.ranking.begin(), report.ranking.end(),
            [&](int a, int b) {
              const auto ia = std::find(features.begin(), features.end(), a) -
                              features.begin();
              const auto ib = std::find(features.begin(), features.end(), b) -
                              features.begin();
              const double sa = report.scores[static_cast<std::size_t>(ia)];
              const double sb = report.scores[static_cast<std::size_t>(ib)];
              if (sa != sb) return sa > sb;
              return a < b;
            });
  return report;
}

std::vector<AblationCurve> ablate(
    const ModelData& data, const AblateOptions& options,
    const std::function<void(int, int)>& progress) {
  check_distinct_seeds(options.trial_seeds);
  options.train.validate();
  if (data.y_train.cols() != kNumAxes) {
    throw ConfigError("ablate: expected 6-axis pose targets");
  }
  const auto n_features = static_cast<int>(data.x_train.cols());

  std::vector<AblationCurve> curves;
  for (std::size_t trial = 0; trial < options.trial_seeds.size(); ++trial) {
    const std::uint64_t trial_seed = options.trial_seeds[trial];
    AblationCurve curve;
    curve.trial_seed = trial_seed;

    // Deactivated columns are pinned to the training-set constant, which is
    // exactly zero after standardization.
    Matrix x_train = data.x_train;
    Matrix x_test = data.x_test;
    std::vector<int> active(static_cast<std::size_t>(n_features));
    for (int f = 0; f < n_features; ++f) {
      active[static_cast<std::size_t>(f)] = f;
    }

    int step = 0;
    while (!active.empty()) {
      if (progress) progress(static_cast<int>(trial), step);
      const std::uint64_t step_seed =
          rng::mix(trial_seed, kAblateStepTag, static_cast<std::uint64_t>(step));

      Mlp model = Mlp::init(
          std::vector<int>{n_features, 128, 64, 32, kNumAxes},
          rng::mix(step_seed, 1u));
      TrainConfig cfg = options.train;
      cfg.shuffle_seed = rng::mix(step_seed, 2u);
      train(model, x_train, data.y_train, Matrix(), Matrix(), cfg);

      const EvalResult eval =
          evaluate(model, x_test, data.y_test, data.standardizer);
      AblationPoint point;
      point.ratio = static_cast<double>(step) / n_features;
      point.roll_mean = eval.per_axis[3].mean_abs;
      point.roll_max = eval.per_axis[3].max_err;
      point.pitch_mean = eval.per_axis[4].mean_abs;
      point.pitch_max = eval.per_axis[4].max_err;
      curve.points.push_back(point);

      const ImportanceReport importance = permutation_importance(
          predictor_of(model), x_test, data.y_test, active,
          options.n_shuffles, rng::mix(step_seed, 3u));
      const int victim = importance.ranking.front();
      x_train.col(victim).setZero();
      x_test.col(victim).setZero();
      active.erase(std::find(active.begin(), active.end(), victim));
      ++step;
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

ShapValues shapley_values(const Predictor& predict, const Matrix& eval_rows,
                          const Matrix& background, int n_permutations,
                          std::uint64_t seed) {
  if (eval_rows.rows() == 0) {
    throw ConfigError("shapley: empty evaluation set");
  }
  if (background.rows() == 0) {
    throw ConfigError("shapley: empty background set");
  }
  if (background.cols() != eval_rows.cols()) {
    throw ConfigError("shapley: background width mismatch");
  }
  if (n_permutations < 1) {
    throw ConfigError("shapley: need at least 1 permutation");
  }

  const auto n_features = static_cast<int>(eval_rows.cols());
  ShapValues values;

  Matrix walk(n_features + 1, n_features);
  for (Eigen::Index r = 0; r < eval_rows.rows(); ++r) {
    Matrix phi;  // sized on the first forward pass, features x outputs
    for (int p = 0; p < n_permutations; ++p) {
      const std::uint64_t perm_seed =
          rng::mix(seed, kShapPermTag, static_cast<std::uint64_t>(r),
                   static_cast<std::uint64_t>(p));
      const std::vector<std::size_t> perm =
          rng::shuffled_indices(static_cast<std::size_t>(n_features),
                                perm_seed);
      rng::Stream back_stream(
          rng::mix(seed, kShapBackTag, static_cast<std::uint64_t>(r),
                   static_cast<std::uint64_t>(p)));
      const auto z = static_cast<Eigen::Index>(
          back_stream.next_index(static_cast<std::size_t>(background.rows())));

      // Row j of the walk has the first j features of the permutation
      // switched from the background value to the evaluation value.
      walk.row(0) = background.row(z);
      for (int j = 0; j < n_features; ++j) {
        walk.row(j + 1) = walk.row(j);
        const auto f = static_cast<Eigen::Index>(perm[static_cast<std::size_t>(j)]);
        walk(j + 1, f) = eval_rows(r, f);
      }

      const Matrix out = predict(walk);
      if (out.rows() != n_features + 1) {
        throw InvariantError("shapley: predictor changed the row count");
      }
      if (phi.size() == 0) {
        phi = Matrix::Zero(n_features, out.cols());
      }
      for (int j = 0; j < n_features; ++j) {
        const auto f = static_cast<Eigen::Index>(perm[static_cast<std::size_t>(j)]);
        phi.row(f) += out.row(j + 1) - out.row(j);
      }
    }
    values.per_row.push_back(phi / n_permutations);
  }
  return values;
}

ShapReport aggregate_shap(const ShapValues& values, std::uint64_t trial_seed) {
  if (values.per_row.empty()) {
    throw ConfigError("aggregate_shap: no rows");
  }
  const auto n_features = static_cast<std::size_t>(values.per_row[0].rows());
  if (n_features < 3) {
    throw ConfigError("aggregate_shap: need at least 3 features");
  }

  ShapReport report;
  report.trial_seed = trial_seed;
  report.aggregate.assign(n_features, 0.0);
  for (const Matrix& phi : values.per_row) {
    for (std::size_t f = 0; f < n_features; ++f) {
      report.aggregate[f] += phi.row(static_cast<Eigen::Index>(f))
                                 .cwiseAbs()
                                 .sum();
    }
  }
  for (double& a : report.aggregate) {
    a /= static_cast<double>(values.per_row.size());
  }

  std::vector<int> order(n_features);
  for (std::size_t f = 0; f < n_features; ++f) {
    order[f] = static_cast<int>(f);
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double sa = report.aggregate[static_cast<std::size_t>(a)];
    const double sb = report.aggregate[static_cast<std::size_t>(b)];
    if (sa != sb) return sa > sb;
    return a < b;
  });
  report.top3 = {order[0], order[1], order[2]};
  return report;
}

NearLimitResult near_limit_attribution(
    const Records& records, const SensorLayout& layout, NearLimit criterion,
    const ShapOptions& options, const std::function<void(int)>& progress) {
  check_distinct_seeds(options.trial_seeds);
  options.train.validate();
  if (options.n_permutations < 1 || options.background_size < 1) {
    throw ConfigError("near-limit attribution: bad sampling options");
  }

  const Records subset = filter_near_limit(records, criterion);
  if (static_cast<int>(subset.size()) < 5) {
    throw ConfigError(
        "near-limit subset has fewer than 5 records; relax the criterion "
        "thresholds or collect a longer trajectory");
  }

  std::array<SensorRow, kNumSensors> region_of{};
  if (static_cast<int>(layout.size()) != kNumSensors) {
    throw ConfigError("near-limit attribution: expected the full layout");
  }
  for (const SensorSpec& s : layout) {
    region_of[static_cast<std::size_t>(s.flat_index())] = s.row;
  }

  NearLimitResult result;
  result.criterion = criterion;
  for (std::size_t trial = 0; trial < options.trial_seeds.size(); ++trial) {
    if (progress) progress(static_cast<int>(trial));
    const std::uint64_t trial_seed = options.trial_seeds[trial];

    const Split split =
        make_split(static_cast<int>(subset.size()), options.test_fraction,
                   rng::mix(trial_seed, kNearTag, 1u));
    const ModelData data = prepare_model_data(subset, split, options.scale);

    Mlp model = make_pose_mlp(rng::mix(trial_seed, kNearTag, 2u));
    TrainConfig cfg = options.train;
    cfg.shuffle_seed = rng::mix(trial_seed, kNearTag, 3u);
    train(model, data.x_train, data.y_train, Matrix(), Matrix(), cfg);

    // Background: seeded sample of training rows, all of them when the
    // training side is small.
    const auto n_train = static_cast<int>(data.x_train.rows());
    const int n_back = std::min(options.background_size, n_train);
    const std::vector<std::size_t> order = rng::shuffled_indices(
        static_cast<std::size_t>(n_train), rng::mix(trial_seed, kNearTag, 4u));
    Matrix background(n_back, data.x_train.cols());
    for (int i = 0; i < n_back; ++i) {
      background.row(i) =
          data.x_train.row(static_cast<Eigen::Index>(order[static_cast<std::size_t>(i)]));
    }

    const ShapValues values = shapley_values(
        predictor_of(model), data.x_test, background, options.n_permutations,
        rng::mix(trial_seed, kNearTag, 5u));
    result.trials.push_back(aggregate_shap(values, trial_seed));
  }

  for (const ShapReport& report : result.trials) {
    for (int f : report.top3) {
      switch (region_of[static_cast<std::size_t>(f)]) {
        case SensorRow::kMidCapsular:
          ++result.regions.rows[0];
          break;
        case SensorRow::kTransitional:
          ++result.regions.rows[1];
          break;
        case SensorRow::kBoneAttachment:
          ++result.regions.rows[2];
          break;
      }
      ++result.regions.frequency[static_cast<std::size_t>(f)];
    }
  }
  result.regions.most_frequent = static_cast<int>(
      std::max_element(result.regions.frequency.begin(),
                       result.regions.frequency.end()) -
      result.regions.frequency.begin());
  return result;
}

}  // namespace proprio
