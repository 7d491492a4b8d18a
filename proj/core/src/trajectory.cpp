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

#include "proprio/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "proprio/common.hpp"
#include "proprio/rng.hpp"

namespace proprio {

namespace {

// Raised cosine easing, 0 -> 1 over x in [0, 1].
double rc(double x) { return 0.5 * (1.0 - std::cos(kPi * x)); }

// Sweep profile over the segment-local fraction s in [0, 1):
// 0 -> +1 (first quarter), +1 -> -1 (half), -1 -> 0 (last quarter),
// all raised-cosine, zero slope at the joins.
double sweep_profile(double s) {
  if (s < 0.25) return rc(s / 0.25);
  if (s < 0.75) return std::cos(2.0 * kPi * (s - 0.25));
  return -rc((1.0 - s) / 0.25);
}

int sweep_axis(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::kRollSweep:
      return 3;
    case SegmentKind::kPitchSweep:
      return 4;
    case SegmentKind::kYawSweep:
      return 5;
    case SegmentKind::kPushPull:
      return 0;
    case SegmentKind::kHold:
      break;
  }
  return -1;
}

double axis_rom(int axis) {
  switch (axis) {
    case 3:
      return kMaxRollDeg;
    case 4:
      return kMaxPitchDeg;
    case 5:
      return kMaxYawDeg;
    default:
      return kMaxTranslation;
  }
}

// Sum of three seeded sines, normalized into [-1, 1] by the coefficient sum
// so the slew bound is a hard guarantee, not an empirical one.
struct WanderSignal {
  double coeff[3];
  double freq_hz[3];
  double phase[3];
  double norm = 1.0;

  static WanderSignal seeded(std::uint64_t seed, int axis) {
    WanderSignal w;
    rng::Stream stream(rng::mix(seed, 0x3a11d3u, static_cast<std::uint64_t>(axis)));
    double total = 0.0;
    for (int j = 0; j < 3; ++j) {
      w.coeff[j] = stream.next_uniform(0.5, 1.0);
      w.freq_hz[j] = stream.next_uniform(0.05, 0.25);
      w.phase[j] = stream.next_uniform(0.0, 2.0 * kPi);
      total += w.coeff[j];
    }
    w.norm = total;
    return w;
  }

  double at(double t) const {
    double v = 0.0;
    for (int j = 0; j < 3; ++j) {
      v += coeff[j] * std::sin(2.0 * kPi * freq_hz[j] * t + phase[j]);
    }
    return v / norm;
  }
};

std::vector<int> allocate_samples(const TrajectoryConfig& config) {
  const int n_segments = static_cast<int>(config.segments.size());
  double total_weight = 0.0;
  for (const Segment& seg : config.segments) {
    if (seg.weight <= 0.0) {
      throw ConfigError("trajectory: segment weights must be positive");
    }
    total_weight += seg.weight;
  }
  std::vector<int> counts(n_segments);
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (int i = 0; i < n_segments; ++i) {
    const double exact = config.n_samples * config.segments[i].weight / total_weight;
    counts[i] = std::max(1, static_cast<int>(std::floor(exact)));
    assigned += counts[i];
    remainders.push_back({exact - std::floor(exact), i});
  }
  // Largest-remainder distribution of whatever floor() left over; if the
  // minimum-1 rule overshot, trim from the largest segments.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  int k = 0;
  while (assigned < config.n_samples) {
    ++counts[remainders[k % remainders.size()].second];
    ++assigned;
    ++k;
  }
  while (assigned > config.n_samples) {
    int largest = static_cast<int>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    if (counts[largest] <= 1) {
      throw ConfigError("trajectory: sample count below segment count");
    }
    --counts[largest];
    --assigned;
  }
  return counts;
}

}  // namespace

std::vector<Segment> TrajectoryConfig::default_plan() {
  return {
      {SegmentKind::kHold, 0.05, 0.0},
      {SegmentKind::kRollSweep, 0.22, kMaxRollDeg},
      {SegmentKind::kPitchSweep, 0.24, kMaxPitchDeg},
      {SegmentKind::kYawSweep, 0.24, kMaxYawDeg},
      {SegmentKind::kPushPull, 0.13, 0.010},
      {SegmentKind::kHold, 0.12, 0.0},
  };
}

std::vector<TimedPose> generate_trajectory(const TrajectoryConfig& config,
                                           std::uint64_t seed) {
  TrajectoryConfig cfg = config;
  if (cfg.segments.empty()) {
    cfg.segments = TrajectoryConfig::default_plan();
  }
  if (cfg.n_samples < static_cast<int>(cfg.segments.size())) {
    throw ConfigError("trajectory: sample count below segment count");
  }
  if (cfg.period <= 0.0) {
    throw ConfigError("trajectory: sample period must be positive");
  }
  for (const Segment& seg : cfg.segments) {
    const int axis = sweep_axis(seg.kind);
    if (axis >= 0 && std::abs(seg.amplitude) > axis_rom(axis)) {
      throw ConfigError("trajectory: segment amplitude exceeds range of motion");
    }
  }
  if (cfg.wander) {
    if (cfg.wander_angle_deg < 0.0 || cfg.wander_translation < 0.0 ||
        cfg.wander_angle_deg > kMaxRollDeg) {
      throw ConfigError("trajectory: wander amplitude out of range");
    }
    // The axial sweep peak zeroes the x wander but leaves y and z; the
    // translation ball must still contain the worst case.
    double worst = 0.0;
    for (const Segment& seg : cfg.segments) {
      if (seg.kind == SegmentKind::kPushPull) {
        worst = std::max(worst, std::abs(seg.amplitude));
      }
    }
    const double w = cfg.wander_translation;
    if (std::sqrt(worst * worst + 2.0 * w * w) > kMaxTranslation) {
      throw ConfigError("trajectory: push-pull amplitude plus wander exceeds "
                        "the translation bound");
    }
  }

  const std::vector<int> counts = allocate_samples(cfg);

  WanderSignal wander[6];
  for (int axis = 0; axis < 6; ++axis) {
    wander[axis] = WanderSignal::seeded(seed, axis);
  }

  std::vector<TimedPose> out;
  out.reserve(cfg.n_samples);

  const int n_segments = static_cast<int>(cfg.segments.size());
  int sample = 0;
  for (int si = 0; si < n_segments; ++si) {
    const Segment& seg = cfg.segments[si];
    const int len = counts[si];
    const int axis = sweep_axis(seg.kind);
    for (int i = 0; i < len; ++i, ++sample) {
      const double t = sample * cfg.period;
      const double s = static_cast<double>(i) / len;

      double v[6] = {0, 0, 0, 0, 0, 0};
      double sweep_v = 0.0;
      if (axis >= 0) {
        sweep_v = seg.amplitude * sweep_profile(s);
        v[axis] = sweep_v;
      }

      if (cfg.wander) {
        // Fade in over the first segment and out over the last one so the
        // run starts and ends exactly at identity.
        double envelope = 1.0;
        if (si == 0) envelope *= rc(s);
        if (si == n_segments - 1) {
          envelope *= rc(1.0 - static_cast<double>(i + 1) / len);
        }
        for (int a = 0; a < 6; ++a) {
          const double amp = a < 3 ? cfg.wander_translation : cfg.wander_angle_deg;
          double windowed = amp * wander[a].at(t) * envelope;
          if (a == axis && std::abs(seg.amplitude) > 0.0) {
            windowed *= 1.0 - std::abs(sweep_v) / std::abs(seg.amplitude);
          }
          v[a] += windowed;
        }
      }

      Pose p;
      p.x = v[0];
      p.y = v[1];
      p.z = v[2];
      p.roll = v[3];
      p.pitch = v[4];
      p.yaw = v[5];
      out.push_back({t, p});
    }
  }

  for (const TimedPose& tp : out) {
    if (!tp.pose.finite() || !within_rom(tp.pose)) {
      throw InvariantError("trajectory: generated pose escaped the range of motion");
    }
  }
  return out;
}

}  // namespace proprio
