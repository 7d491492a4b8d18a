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

#ifndef PROPRIO_PIPELINE_HPP_
#define PROPRIO_PIPELINE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "proprio/attribution.hpp"
#include "proprio/config.hpp"
#include "proprio/dataset.hpp"
#include "proprio/mlp.hpp"
#include "proprio/simulate.hpp"
#include "proprio/stats.hpp"
#include "proprio/trajectory.hpp"

namespace proprio {

inline constexpr const char* kProprioVersion = "0.1.0";

// FNV-1a, the 64-bit variant; manifests record one hash per output file.
std::uint64_t fnv1a64(const void* data, std::size_t len,
                      std::uint64_t basis = 0xcbf29ce484222325ull);
std::uint64_t fnv1a64_file(const std::string& path);
std::string hex_u64(std::uint64_t v);

// Every stochastic stage draws from a sub-seed mixed out of the master
// seed, so one integer pins the whole pipeline. Explicit config values
// (split.seed, ablate.seeds, attr.seeds) override their derived entries.
struct SeedPlan {
  std::uint64_t master = 0;
  std::uint64_t layout = 0;
  std::uint64_t wander = 0;
  std::uint64_t sim = 0;
  std::uint64_t split = 0;
  std::uint64_t init = 0;
  std::uint64_t shuffle = 0;
  std::vector<std::uint64_t> ablate_trials;
  std::vector<std::uint64_t> attr_trials;

  static SeedPlan from(const Config& config);
};

TrajectoryConfig trajectory_config_from(const Config& config);
ReadoutParams readout_from(const Config& config);
FailurePlan failure_plan_from(const Config& config);
TrainConfig train_config_from(const Config& config, std::uint64_t shuffle_seed);
TargetScale target_scale_from(const Config& config);
CapsuleGeometry geometry_from(const Config& config);
NearLimit criterion_from(const std::string& name);

struct SimulateOutcome {
  int n_rows = 0;
  std::string csv_path;
};

struct TrainOutcome {
  TrainReport report;
  EvalResult eval;
  std::string checkpoint_path;
};

struct AblateOutcome {
  std::vector<AblationCurve> curves;
  bool stats_suppressed = false;
  // keys "mean.pitch", "mean.roll", "max.pitch", "max.roll"; value is the
  // first Holm-significant ratio, or nullopt when none reached significance.
  std::map<std::string, std::optional<double>> first_significant;
};

struct AttributeOutcome {
  NearLimitResult result;
  int subset_size = 0;
};

SimulateOutcome run_simulate(const Config& config, const std::string& out_dir);
TrainOutcome run_train(const Config& config, const std::string& dataset_csv,
                       const std::string& out_dir);
AblateOutcome run_ablate(const Config& config, const std::string& dataset_csv,
                         const std::string& out_dir);
AttributeOutcome run_attribute(const Config& config,
                               const std::string& dataset_csv,
                               const std::string& out_dir, NearLimit criterion);

struct ReproOutcome {
  SimulateOutcome sim;
  std::optional<TrainOutcome> train;
  std::optional<AblateOutcome> ablate;
  std::vector<AttributeOutcome> attributes;  // twist, bend, push-pull order
  std::string summary_path;
};

// The whole experiment under one output directory: simulate -> train ->
// ablate -> attribute(all criteria), then a summary of achieved numbers
// against the reference values. `stages` picks a subset; empty means all.
// On a mid-run failure the partial manifest is still written.
ReproOutcome run_repro(const Config& config, const std::string& out_dir,
                       const std::vector<std::string>& stages = {});

}  // namespace proprio

#endif  // PROPRIO_PIPELINE_HPP_
