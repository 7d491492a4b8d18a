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

#ifndef PROPRIO_POSE_HPP_
#define PROPRIO_POSE_HPP_

#include <Eigen/Geometry>
#include <cmath>

#include "proprio/common.hpp"

namespace proprio {

// 6-DOF joint state of the moving bone relative to the fixed bone.
// Translations in meters, rotations in degrees. The bone axis is x by
// layout convention: roll twists about the bone axis, pitch and yaw bend.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) &&
           std::isfinite(roll) && std::isfinite(pitch) && std::isfinite(yaw);
  }
};

struct TimedPose {
  double t = 0.0;
  Pose pose;
};

// Range of motion of the joint.
inline constexpr double kMaxRollDeg = 45.0;
inline constexpr double kMaxPitchDeg = 90.0;
inline constexpr double kMaxYawDeg = 90.0;
inline constexpr double kMaxTranslation = 0.012;  // meters

inline bool within_rom(const Pose& p, double slack = 1e-9) {
  return std::abs(p.roll) <= kMaxRollDeg + slack &&
         std::abs(p.pitch) <= kMaxPitchDeg + slack &&
         std::abs(p.yaw) <= kMaxYawDeg + slack &&
         std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z) <=
             kMaxTranslation + slack;
}

// Intrinsic Z-Y-X: yaw about z, then pitch about the rotated y, then roll
// about the rotated x. Equivalent extrinsic form: Rz(yaw)·Ry(pitch)·Rx(roll).
inline Eigen::Quaterniond rotation_of(const Pose& p) {
  return Eigen::Quaterniond(
      Eigen::AngleAxisd(p.yaw * kDegToRad, Eigen::Vector3d::UnitZ()) *
      Eigen::AngleAxisd(p.pitch * kDegToRad, Eigen::Vector3d::UnitY()) *
      Eigen::AngleAxisd(p.roll * kDegToRad, Eigen::Vector3d::UnitX()));
}

inline Vec3 translation_of(const Pose& p) { return Vec3(p.x, p.y, p.z); }

}  // namespace proprio

#endif  // PROPRIO_POSE_HPP_
