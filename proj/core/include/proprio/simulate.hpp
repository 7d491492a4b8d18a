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

#ifndef PROPRIO_SIMULATE_HPP_
#define PROPRIO_SIMULATE_HPP_

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "proprio/capsule.hpp"
#include "proprio/common.hpp"
#include "proprio/pose.hpp"
#include "proprio/trajectory.hpp"

namespace proprio {

// Which sensors are broken, and how. When `failed_at_start` is empty,
// `failed_at_start_count` distinct sensors are drawn from the seed instead;
// a non-empty list wins over the count.
struct FailurePlan {
  int failed_at_start_count = 20;
  std::vector<int> failed_at_start;
  std::vector<std::pair<int, double>> disconnects;

  static FailurePlan none() {
    FailurePlan plan;
    plan.failed_at_start_count = 0;
    return plan;
  }
};

// Returns a copy of the layout with the plan's statuses applied.
SensorLayout apply_failure_plan(const SensorLayout& layout,
                                const FailurePlan& plan, std::uint64_t seed);

// Linear-in-time offset between the recorded pose and the true pose,
// reaching `final_offset` exactly at the last sample. Off by default.
struct DriftModel {
  bool enabled = false;
  Pose final_offset{0.001, 0.002, 0.004, 0.203, 1.082, 1.053};
};

struct SimSample {
  double t = 0.0;
  std::array<int, kNumSensors> counts{};
  Pose true_pose;
  Pose recorded_pose;
};

std::vector<SimSample> simulate(const CapsuleGeometry& geometry,
                                const std::vector<TimedPose>& trajectory,
                                const FailurePlan& plan,
                                const DriftModel& drift,
                                const ReadoutParams& readout,
                                std::uint64_t seed);

}  // namespace proprio

#endif  // PROPRIO_SIMULATE_HPP_
