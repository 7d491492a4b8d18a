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

#include "proprio/simulate.hpp"

#include <algorithm>
#include <set>

#include "proprio/rng.hpp"

namespace proprio {

namespace {
constexpr std::uint64_t kFailureTag = 0xfa11u;
constexpr std::uint64_t kNoiseTag = 0x0153u;
}  // namespace

SensorLayout apply_failure_plan(const SensorLayout& layout,
                                const FailurePlan& plan, std::uint64_t seed) {
  SensorLayout out = layout;
  const int n = static_cast<int>(out.size());
  for (SensorSpec& s : out) {
    s.status = SensorStatus::active();
  }

  std::vector<int> failed = plan.failed_at_start;
  if (failed.empty() && plan.failed_at_start_count > 0) {
    if (plan.failed_at_start_count > n) {
      throw ConfigError("failure plan: more failed sensors than sensors");
    }
    std::vector<std::size_t> order =
        rng::shuffled_indices(static_cast<std::size_t>(n),
                              rng::mix(seed, kFailureTag));
    for (int i = 0; i < plan.failed_at_start_count; ++i) {
      failed.push_back(static_cast<int>(order[i]));
    }
  }
  if (plan.failed_at_start_count < 0) {
    throw ConfigError("failure plan: negative failure count");
  }

  std::set<int> seen;
  for (int idx : failed) {
    if (idx < 0 || idx >= n) {
      throw ConfigError("failure plan: sensor index out of range");
    }
    if (!seen.insert(idx).second) {
      throw ConfigError("failure plan: duplicate sensor index");
    }
    out[idx].status = SensorStatus::failed_at_start();
  }
  for (const auto& [idx, t0] : plan.disconnects) {
    if (idx < 0 || idx >= n) {
      throw ConfigError("failure plan: sensor index out of range");
    }
    if (seen.count(idx)) {
      throw ConfigError("failure plan: sensor listed twice");
    }
    seen.insert(idx);
    out[idx].status = SensorStatus::disconnects_at(t0);
  }
  return out;
}

std::vector<SimSample> simulate(const CapsuleGeometry& geometry,
                                const std::vector<TimedPose>& trajectory,
                                const FailurePlan& plan,
                                const DriftModel& drift,
                                const ReadoutParams& readout,
                                std::uint64_t seed) {
  CapsuleGeometry geo = geometry;
  geo.layout = apply_failure_plan(geometry.layout, plan, seed);
  validate_geometry(geo);

  const std::uint64_t noise_seed = rng::mix(seed, kNoiseTag);
  const int n = static_cast<int>(trajectory.size());

  std::vector<SimSample> out;
  out.reserve(trajectory.size());
  for (int i = 0; i < n; ++i) {
    const TimedPose& tp = trajectory[i];
    SimSample sample;
    sample.t = tp.t;
    sample.true_pose = tp.pose;

    sample.recorded_pose = tp.pose;
    if (drift.enabled) {
      const double f = n > 1 ? static_cast<double>(i) / (n - 1) : 1.0;
      const Pose& d = drift.final_offset;
      sample.recorded_pose.x += f * d.x;
      sample.recorded_pose.y += f * d.y;
      sample.recorded_pose.z += f * d.z;
      sample.recorded_pose.roll += f * d.roll;
      sample.recorded_pose.pitch += f * d.pitch;
      sample.recorded_pose.yaw += f * d.yaw;
    }

    for (const SensorSpec& sensor : geo.layout) {
      const double eps = sensor.status.failed_at(tp.t)
                             ? 0.0
                             : gauge_strain(geo, tp.pose, sensor);
      const double volts =
          sensor_voltage(eps, sensor, tp.t, noise_seed, readout);
      sample.counts[static_cast<std::size_t>(sensor.flat_index())] =
          to_adc(volts, readout);
    }
    out.push_back(sample);
  }
  return out;
}

}  // namespace proprio
