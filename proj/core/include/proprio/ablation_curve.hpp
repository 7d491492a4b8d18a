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

#ifndef PROPRIO_ABLATION_CURVE_HPP_
#define PROPRIO_ABLATION_CURVE_HPP_

#include <cstdint>
#include <vector>

namespace proprio {

// One point of a sensor-reduction curve. Errors are absolute-angle
// statistics on the test split, in degrees.
struct AblationPoint {
  double ratio = 0.0;  // removed features / total features
  double pitch_mean = 0.0;
  double pitch_max = 0.0;
  double roll_mean = 0.0;
  double roll_max = 0.0;
};

struct AblationCurve {
  std::uint64_t trial_seed = 0;
  std::vector<AblationPoint> points;  // strictly increasing ratios
};

enum class AblationMetric { kMean, kMax };
enum class AblationAxis { kPitch, kRoll };

inline const char* ablation_metric_name(AblationMetric m) {
  return m == AblationMetric::kMean ? "mean" : "max";
}

inline const char* ablation_axis_name(AblationAxis a) {
  return a == AblationAxis::kPitch ? "pitch" : "roll";
}

inline double ablation_value(const AblationPoint& p, AblationMetric m,
                             AblationAxis a) {
  if (a == AblationAxis::kPitch) {
    return m == AblationMetric::kMean ? p.pitch_mean : p.pitch_max;
  }
  return m == AblationMetric::kMean ? p.roll_mean : p.roll_max;
}

}  // namespace proprio

#endif  // PROPRIO_ABLATION_CURVE_HPP_
