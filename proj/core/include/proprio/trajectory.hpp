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

#ifndef PROPRIO_TRAJECTORY_HPP_
#define PROPRIO_TRAJECTORY_HPP_

#include <cstdint>
#include <vector>

#include "proprio/pose.hpp"

namespace proprio {

enum class SegmentKind { kHold, kRollSweep, kPitchSweep, kYawSweep, kPushPull };

// One motion segment. A sweep eases 0 -> +A -> -A -> 0 with raised-cosine
// pieces (quarter, half, quarter of the segment), so segment boundaries have
// zero velocity.
struct Segment {
  SegmentKind kind = SegmentKind::kHold;
  double weight = 1.0;     // share of the total sample budget
  double amplitude = 0.0;  // degrees for sweeps, meters for push-pull
};

struct TrajectoryConfig {
  int n_samples = 1263;
  double period = 0.1;  // seconds per sample
  std::vector<Segment> segments;

  // Low-amplitude multi-sine wander on all six axes so samples are not
  // confined to the coordinate axes. Windowed to zero where the active
  // sweep peaks (ROM bounds stay exact) and enveloped to zero over the
  // first and last segments (the run starts and ends at identity).
  bool wander = true;
  double wander_angle_deg = 3.0;
  double wander_translation = 0.0015;  // meters

  static std::vector<Segment> default_plan();
};

// Smooth slow-motion plan covering the joint's range: neutral hold, roll
// sweep, pitch sweep, yaw sweep, axial push-pull, return hold. Deterministic
// in the seed. Throws ConfigError when the plan cannot be sampled.
std::vector<TimedPose> generate_trajectory(const TrajectoryConfig& config,
                                           std::uint64_t seed);

}  // namespace proprio

#endif  // PROPRIO_TRAJECTORY_HPP_
