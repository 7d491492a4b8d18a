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

#include "proprio/capsule.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <set>

#include "proprio/rng.hpp"

namespace proprio {

namespace {

constexpr double kRowLatitudesDeg[3] = {10.0, 25.0, 40.0};

// Deliberate gauge tilt away from the meridian, alternating sign along
// each row. A rosette-style criss-cross keeps twist observable: a purely
// meridional gauge barely changes length under roll, so the layout would
// lean entirely on placement error for twist sensitivity. Alternating
// diagonals also separate the lateral-translation and rotation responses,
// which are nearly parallel for a meridional-only band this close to the
// bone axis.
constexpr double kGaugeTiltDeg = 45.0;

// Sensors per (row, tilt sign): 20 per row, alternating parity.
constexpr int kPerSign = kNumSensors / 3 / 2;

// Pitch rotates the shell about y, and a gauge's endpoints ride the shell
// at slightly different interpolation fractions u. The squared chord
// length works out to A - B*cos(dpsi + pitch*du), where dpsi is the
// endpoints' azimuth gap about the y axis; the response reverses inside a
// forward sweep exactly when that phase crosses a multiple of 180. With a
// tilted axis the gap carries a deliberate offset, so the reversal-prone
// longitudes depend on the tilt sign. Each row/sign pair keeps clear of
// two certified arcs: inside them some placement within the jitter
// tolerance (+-2 mm position, +-10 degrees axis) would put the phase
// window [dpsi - 90*|du|, dpsi + 90*|du|] within 0.5 degrees of a
// reversal for some pitch in [-90, 90]. Arcs below were measured for the
// negative tilt; the positive-tilt arcs are their mirrors through
// longitude 360 - x. Values padded by ~1 degree.
constexpr double kKeepOutNegDeg[3][2][2] = {
    {{52.25, 89.0}, {232.25, 269.0}},
    {{5.6, 86.25}, {185.6, 266.25}},
    {{1.9, 89.65}, {181.9, 269.65}},
};

// The j-th sensor of a (row, tilt sign) group sits at the centroid of its
// slice of the safe longitudes: the full circle minus that sign's two
// keep-out arcs.
double row_longitude(int row, int tilt_sign, int j) {
  double arcs[2][2];
  if (tilt_sign < 0) {
    arcs[0][0] = kKeepOutNegDeg[row][0][0];
    arcs[0][1] = kKeepOutNegDeg[row][0][1];
    arcs[1][0] = kKeepOutNegDeg[row][1][0];
    arcs[1][1] = kKeepOutNegDeg[row][1][1];
  } else {
    arcs[0][0] = 360.0 - kKeepOutNegDeg[row][1][1];
    arcs[0][1] = 360.0 - kKeepOutNegDeg[row][1][0];
    arcs[1][0] = 360.0 - kKeepOutNegDeg[row][0][1];
    arcs[1][1] = 360.0 - kKeepOutNegDeg[row][0][0];
  }
  const double seg[3] = {arcs[0][0], arcs[1][0] - arcs[0][1],
                         360.0 - arcs[1][1]};
  const double measure = seg[0] + seg[1] + seg[2];
  double s = (j + 0.5) * measure / kPerSign;
  if (s < seg[0]) return s;
  s -= seg[0];
  if (s < seg[1]) return arcs[0][1] + s;
  s -= seg[1];
  return arcs[1][1] + s;
}

Vec3 unit_radial(double lat_rad, double lon_rad) {
  return Vec3(std::sin(lat_rad), std::cos(lat_rad) * std::sin(lon_rad),
              std::cos(lat_rad) * std::cos(lon_rad));
}

// Tangent pointing toward increasing latitude.
Vec3 meridional_tangent(double lat_rad, double lon_rad) {
  return Vec3(std::cos(lat_rad), -std::sin(lat_rad) * std::sin(lon_rad),
              -std::sin(lat_rad) * std::cos(lon_rad));
}

// Tangent pointing toward increasing longitude.
Vec3 zonal_tangent(double lon_rad) {
  return Vec3(0.0, std::cos(lon_rad), -std::sin(lon_rad));
}

double latitude_fraction(const CapsuleGeometry& g, double latitude_deg) {
  return (latitude_deg - g.fixed_ring_latitude) /
         (g.moving_ring_latitude - g.fixed_ring_latitude);
}

// Interpolated rigid motion applied to a point near the shell; the fraction
// comes from the latitude of the point's direction from the joint center.
Vec3 deform_cartesian(const CapsuleGeometry& g, const Pose& pose,
                      const Vec3& point) {
  const double lat_deg = std::asin(point.normalized().x()) * kRadToDeg;
  const double u = latitude_fraction(g, lat_deg);
  if (u < 0.0 || u > 1.0) {
    throw std::domain_error("deform_point: latitude outside the ring span");
  }
  const Eigen::Quaterniond full = rotation_of(pose);
  const Eigen::Quaterniond partial =
      Eigen::Quaterniond::Identity().slerp(u, full);
  return partial * point + u * translation_of(pose);
}

}  // namespace

const char* row_name(SensorRow row) {
  switch (row) {
    case SensorRow::kMidCapsular:
      return "mid_capsular";
    case SensorRow::kTransitional:
      return "transitional";
    case SensorRow::kBoneAttachment:
      return "bone_attachment";
  }
  return "unknown";
}

double CapsuleGeometry::shell_volume() const {
  return 4.0 * kPi * sphere_radius * sphere_radius * capsule_thickness;
}

CapsuleGeometry default_geometry(const LayoutParams& params) {
  CapsuleGeometry g;
  g.layout.reserve(kNumSensors);

  for (int board = 0; board < kNumBoards; ++board) {
    for (int index = 0; index < kSensorsPerBoard; ++index) {
      SensorSpec s;
      s.board = board;
      s.index = index;
      char label[32];
      std::snprintf(label, sizeof(label), "adc%d_data%d", board, index);
      s.label = label;

      const int row = index / 5;   // 5 channels per row on each board
      const int slot = index % 5;  // position along the board's quadrant
      s.row = static_cast<SensorRow>(row);

      const int k = board * 5 + slot;
      const int tilt_sign = (k % 2 == 0) ? -1 : 1;
      const double base_lat = kRowLatitudesDeg[row];
      const double base_lon = row_longitude(row, tilt_sign, k / 2);

      rng::Stream jitter(
          rng::mix(params.seed, 0x1a70u, static_cast<std::uint64_t>(
                                             board * kSensorsPerBoard + index)));
      // Manual-placement imitation: surface-arc offsets and an axis tilt.
      const double r = g.sphere_radius;
      const double dlat =
          jitter.next_uniform(-params.position_jitter, params.position_jitter) /
          r * kRadToDeg;
      const double lat = base_lat + dlat;
      const double dlon =
          jitter.next_uniform(-params.position_jitter, params.position_jitter) /
          (r * std::cos(lat * kDegToRad)) * kRadToDeg;
      const double lon = base_lon + dlon;
      const double tilt = (tilt_sign * kGaugeTiltDeg +
                           jitter.next_uniform(-params.axis_jitter_deg,
                                               params.axis_jitter_deg)) *
                          kDegToRad;

      s.center_latitude = lat;
      s.center_longitude = lon;
      s.gauge_axis = std::cos(tilt) * meridional_tangent(lat * kDegToRad,
                                                         lon * kDegToRad) +
                     std::sin(tilt) * zonal_tangent(lon * kDegToRad);
      s.gauge_length = params.gauge_length;
      g.layout.push_back(s);
    }
  }
  validate_geometry(g);
  return g;
}

void validate_geometry(const CapsuleGeometry& g) {
  if (g.sphere_radius <= 0.0 || g.capsule_thickness <= 0.0) {
    throw InvariantError("capsule: nonpositive geometry constant");
  }
  if (g.fixed_ring_latitude >= g.moving_ring_latitude) {
    throw InvariantError("capsule: ring latitudes out of order");
  }
  if (g.layout.size() != kNumSensors) {
    throw InvariantError("capsule: layout must contain 60 sensors");
  }
  std::set<std::pair<int, int>> ids;
  std::set<std::string> labels;
  int per_board[kNumBoards] = {0};
  int per_row[3] = {0};
  for (const SensorSpec& s : g.layout) {
    if (s.board < 0 || s.board >= kNumBoards || s.index < 0 ||
        s.index >= kSensorsPerBoard) {
      throw InvariantError("capsule: sensor id out of range");
    }
    ids.insert({s.board, s.index});
    labels.insert(s.label);
    ++per_board[s.board];
    ++per_row[static_cast<int>(s.row)];
    if (s.center_latitude <= g.fixed_ring_latitude ||
        s.center_latitude >= g.moving_ring_latitude) {
      throw InvariantError("capsule: sensor latitude outside the ring span");
    }
    const Vec3 radial = unit_radial(s.center_latitude * kDegToRad,
                                    s.center_longitude * kDegToRad);
    if (std::abs(s.gauge_axis.norm() - 1.0) >= 1e-12 ||
        std::abs(s.gauge_axis.dot(radial)) >= 1e-12) {
      throw InvariantError("capsule: gauge axis not a unit surface tangent");
    }
    if (s.gauge_length <= 0.0) {
      throw InvariantError("capsule: nonpositive gauge length");
    }
  }
  if (ids.size() != kNumSensors) {
    throw InvariantError("capsule: duplicate (board,index)");
  }
  if (labels.size() != kNumSensors) {
    throw InvariantError("capsule: duplicate channel label");
  }
  for (int b = 0; b < kNumBoards; ++b) {
    if (per_board[b] != kSensorsPerBoard) {
      throw InvariantError("capsule: board channel count != 15");
    }
  }
  for (int r = 0; r < 3; ++r) {
    if (per_row[r] != kNumSensors / 3) {
      throw InvariantError("capsule: row sensor count != 20");
    }
  }
}

Vec3 surface_point(const CapsuleGeometry& geometry, double latitude_deg,
                   double longitude_deg) {
  return geometry.sphere_radius *
         unit_radial(latitude_deg * kDegToRad, longitude_deg * kDegToRad);
}

Vec3 deform_point(const CapsuleGeometry& geometry, const Pose& pose,
                  double latitude_deg, double longitude_deg) {
  const double u = latitude_fraction(geometry, latitude_deg);
  if (u < 0.0 || u > 1.0) {
    throw std::domain_error("deform_point: latitude outside the ring span");
  }
  return deform_cartesian(geometry, pose,
                          surface_point(geometry, latitude_deg, longitude_deg));
}

double gauge_strain(const CapsuleGeometry& geometry, const Pose& pose,
                    const SensorSpec& sensor) {
  const Vec3 center = surface_point(geometry, sensor.center_latitude,
                                    sensor.center_longitude);
  // Chord endpoints: rest separation is exactly the gauge length, so the
  // identity pose reads zero strain by construction.
  const Vec3 offset = 0.5 * sensor.gauge_length * sensor.gauge_axis;
  const Vec3 a = deform_cartesian(geometry, pose, center + offset);
  const Vec3 b = deform_cartesian(geometry, pose, center - offset);
  return (a - b).norm() / sensor.gauge_length - 1.0;
}

double pre_clamp_voltage(double strain, const ReadoutParams& params) {
  return params.rest_voltage + params.gain * strain;
}

double sensor_voltage(double strain, const SensorSpec& sensor, double t,
                      std::uint64_t noise_seed, const ReadoutParams& params) {
  const std::uint64_t t_key = std::bit_cast<std::uint64_t>(t);
  const std::uint64_t sensor_key =
      static_cast<std::uint64_t>(sensor.flat_index());

  double v;
  if (sensor.status.failed_at(t)) {
    const bool high_rail = rng::mix(noise_seed, 0x7a11u, sensor_key) & 1u;
    v = high_rail ? params.supply_voltage : 0.0;
  } else {
    v = pre_clamp_voltage(strain, params);
  }
  if (params.noise_sigma > 0.0) {
    v += params.noise_sigma *
         rng::gaussian_at(rng::mix(noise_seed, sensor_key, t_key));
  }
  return std::clamp(v, 0.0, params.supply_voltage);
}

int to_adc(double voltage, const ReadoutParams& params) {
  if (voltage < 0.0 || voltage > params.supply_voltage) {
    throw InvariantError("to_adc: voltage outside the rail range");
  }
  const long count =
      std::lround(voltage * params.adc_full_scale / params.supply_voltage);
  return static_cast<int>(
      std::clamp(count, 0L, static_cast<long>(params.adc_full_scale)));
}

}  // namespace proprio
