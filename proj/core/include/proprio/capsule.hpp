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

#ifndef PROPRIO_CAPSULE_HPP_
#define PROPRIO_CAPSULE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "proprio/common.hpp"
#include "proprio/pose.hpp"

namespace proprio {

enum class SensorRow { kMidCapsular, kTransitional, kBoneAttachment };

const char* row_name(SensorRow row);

enum class SensorState { kActive, kFailedAtStart, kDisconnectsAt };

struct SensorStatus {
  SensorState state = SensorState::kActive;
  double disconnect_time = 0.0;  // used when state == kDisconnectsAt

  static SensorStatus active() { return {}; }
  static SensorStatus failed_at_start() {
    return {SensorState::kFailedAtStart, 0.0};
  }
  static SensorStatus disconnects_at(double t) {
    return {SensorState::kDisconnectsAt, t};
  }

  bool failed_at(double t) const {
    switch (state) {
      case SensorState::kActive:
        return false;
      case SensorState::kFailedAtStart:
        return true;
      case SensorState::kDisconnectsAt:
        return t >= disconnect_time;
    }
    return false;
  }
};

// One strain gauge bonded to the capsule membrane.
struct SensorSpec {
  int board = 0;       // 0..3
  int index = 0;       // 0..14 within the board
  std::string label;   // "adc{board}_data{index}"
  SensorRow row = SensorRow::kMidCapsular;
  double center_longitude = 0.0;  // degrees, measured from +z toward +y
  double center_latitude = 0.0;   // degrees from the equatorial plane
  Vec3 gauge_axis = Vec3::UnitX();  // unit tangent at the center
  double gauge_length = 0.005;      // meters
  SensorStatus status;

  int flat_index() const { return board * kSensorsPerBoard + index; }
};

using SensorLayout = std::vector<SensorSpec>;

struct CapsuleGeometry {
  double sphere_radius = 0.050;      // meters
  double capsule_thickness = 0.002;  // meters
  double fixed_ring_latitude = -60.0;
  double moving_ring_latitude = 60.0;
  SensorLayout layout;

  // Thin-shell approximation, 4*pi*R^2*t.
  double shell_volume() const;
};

struct LayoutParams {
  double gauge_length = 0.005;        // meters
  double position_jitter = 0.002;     // meters of surface arc, uniform +-
  double axis_jitter_deg = 10.0;      // uniform +- tilt from the meridian
  std::uint64_t seed = 7;             // placement seed (fixed hardware)
};

// Builds the default 60-sensor placement: three latitude rows of 20, four
// boards of 15 channels each, board b covering the longitude quadrant
// starting at b*90 degrees, with seeded placement jitter imitating manual
// assembly. Higher channel indices sit closer to the moving-bone ring.
CapsuleGeometry default_geometry(const LayoutParams& params = {});

// Throws InvariantError when a structural invariant is broken.
void validate_geometry(const CapsuleGeometry& geometry);

// Cartesian position of a surface point given spherical coordinates.
Vec3 surface_point(const CapsuleGeometry& geometry, double latitude_deg,
                   double longitude_deg);

// Membrane kinematics: a point at normalized latitude fraction u between the
// fixed ring (u=0) and the moving ring (u=1) undergoes the pose motion
// interpolated at u: rotation slerped on the shortest arc from identity,
// translation scaled linearly. Points are taken about the joint center.
Vec3 deform_point(const CapsuleGeometry& geometry, const Pose& pose,
                  double latitude_deg, double longitude_deg);

// Strain of one gauge under a pose: endpoint separation over rest length,
// minus one. Zero at identity, positive = stretch. Static in time: the
// response has no adaptation, matching a slow-adapting receptor.
double gauge_strain(const CapsuleGeometry& geometry, const Pose& pose,
                    const SensorSpec& sensor);

struct ReadoutParams {
  double rest_voltage = 1.65;      // volts, mid-rail bridge balance
  double gain = 8.0;               // volts per unit strain
  double noise_sigma = 0.01;       // volts
  double supply_voltage = 3.3;     // volts
  int adc_full_scale = 628;        // counts at supply_voltage
};

// Voltage before the rail clamp, with no noise. Used by response tests.
double pre_clamp_voltage(double strain, const ReadoutParams& params = {});

// Full channel model: amplified bridge voltage plus Gaussian noise, clamped
// to the rails. A failed channel reads its rail (chosen per sensor from the
// seed) plus noise instead of the strain signal. Noise is counter-based,
// keyed by (seed, sensor, t), so frames may be generated in any order.
double sensor_voltage(double strain, const SensorSpec& sensor, double t,
                      std::uint64_t noise_seed,
                      const ReadoutParams& params = {});

// count = round(V * full_scale / supply), clamped to [0, full_scale].
// V outside [0, supply] is a caller bug.
int to_adc(double voltage, const ReadoutParams& params = {});

}  // namespace proprio

#endif  // PROPRIO_CAPSULE_HPP_
