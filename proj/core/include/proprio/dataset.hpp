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

#ifndef PROPRIO_DATASET_HPP_
#define PROPRIO_DATASET_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "proprio/common.hpp"
#include "proprio/pose.hpp"
#include "proprio/simulate.hpp"

namespace proprio {

inline constexpr int kAdcCeiling = 628;

// One logged sample: timestamp, the 60 raw ADC counts in adc0_data0 ..
// adc3_data14 order, and the recorded pose.
struct Record {
  double t = 0.0;
  std::array<int, kNumSensors> counts{};
  Pose pose;
};

using Records = std::vector<Record>;

// Uses the recorded pose (which carries drift when the model is on);
// the true pose is simulation-internal.
Records to_records(const std::vector<SimSample>& samples);

// Column order: t, adc0_data0 .. adc3_data14, x, y, z, roll, pitch, yaw.
// Counts are integers; t and pose are written with enough digits to
// round-trip exactly.
void write_csv(const Records& records, std::ostream& out);
void write_csv(const Records& records, const std::string& path);
Records read_csv(std::istream& in);
Records read_csv(const std::string& path);

struct Split {
  std::vector<int> train;
  std::vector<int> test;
  double test_fraction = 0.20;
  std::uint64_t seed = 0;
};

// Uniform random split; |test| = round(test_fraction * n). Requires n >= 5
// and test_fraction in (0, 1). Both halves are sorted ascending.
Split make_split(int n, double test_fraction, std::uint64_t seed);

// The three near-limit regimes: twisting, bending, axial push-pull.
enum class NearLimit { kTwist, kBend, kPushPull };

const char* near_limit_name(NearLimit criterion);

bool near_limit_match(const Pose& pose, NearLimit criterion);

// Order-preserving subset of records in the given regime.
Records filter_near_limit(const Records& records, NearLimit criterion);

// Target unit convention for training. RadiansMeters rescales angles to
// radians so translation and rotation errors live within a couple of orders
// of magnitude under MSE; PaperRaw keeps degrees and meters unscaled.
enum class TargetScale { kPaperRaw, kRadiansMeters };

const char* target_scale_name(TargetScale scale);

// Per-channel affine input scaling fitted on training rows only.
// Zero-variance channels get a unit divisor.
struct Standardizer {
  Vector mean = Vector::Zero(kNumSensors);
  Vector stddev = Vector::Ones(kNumSensors);
  TargetScale target_scale = TargetScale::kRadiansMeters;

  static Standardizer fit(const Records& records,
                          const std::vector<int>& train_indices,
                          TargetScale scale);

  // (raw - mean) / stddev, column-wise; raw is n x 60 of counts.
  Matrix apply(const Matrix& raw) const;

  // Targets in training space, n x 6, columns x,y,z,roll,pitch,yaw.
  Matrix target_matrix(const Records& records,
                       const std::vector<int>& indices) const;

  // Training-space targets or predictions -> meters and degrees.
  Matrix to_output_units(const Matrix& targets) const;
};

// Raw count matrix (n x 60) for the chosen rows.
Matrix input_matrix(const Records& records, const std::vector<int>& indices);

std::vector<int> all_indices(int n);

// The standard bundle handed to training: standardized inputs and
// training-space targets for both halves of the split.
struct ModelData {
  Matrix x_train;
  Matrix y_train;
  Matrix x_test;
  Matrix y_test;
  Standardizer standardizer;
};

ModelData prepare_model_data(const Records& records, const Split& split,
                             TargetScale scale);

}  // namespace proprio

#endif  // PROPRIO_DATASET_HPP_
