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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "proprio/common.hpp"
#include "proprio/pose.hpp"
#include "proprio/trajectory.hpp"

namespace {

using namespace proprio;

double max_step(const std::vector<TimedPose>& traj,
                double Pose::* axis) {
  double worst = 0.0;
  for (size_t i = 1; i < traj.size(); ++i) {
    worst = std::max(worst,
                     std::abs(traj[i].pose.*axis - traj[i - 1].pose.*axis));
  }
  return worst;
}

bool near_identity(const Pose& p, double tol_deg, double tol_m) {
  return std::abs(p.roll) < tol_deg && std::abs(p.pitch) < tol_deg &&
         std::abs(p.yaw) < tol_deg && std::abs(p.x) < tol_m &&
         std::abs(p.y) < tol_m && std::abs(p.z) < tol_m;
}

}  // namespace

TEST_CASE("default plan produces the documented run") {
  TrajectoryConfig cfg;
  cfg.segments = TrajectoryConfig::default_plan();
  auto traj = generate_trajectory(cfg, 42);
  REQUIRE(traj.size() == 1263);
  CHECK(traj.front().t == 0.0);
  CHECK(traj[1].t == doctest::Approx(0.1));
  CHECK(traj.back().t == doctest::Approx(0.1 * 1262.0));
  // Wander is enveloped to zero at the run boundaries.
  CHECK(near_identity(traj.front().pose, 1e-12, 1e-15));
  CHECK(near_identity(traj.back().pose, 0.5, 1e-4));
  // Every sweep family reaches most of its amplitude somewhere.
  double roll_span = 0.0, pitch_span = 0.0, yaw_span = 0.0, x_span = 0.0;
  for (const auto& tp : traj) {
    roll_span = std::max(roll_span, std::abs(tp.pose.roll));
    pitch_span = std::max(pitch_span, std::abs(tp.pose.pitch));
    yaw_span = std::max(yaw_span, std::abs(tp.pose.yaw));
    x_span = std::max(x_span, std::abs(tp.pose.x));
    CHECK(within_rom(tp.pose));
  }
  CHECK(roll_span > 40.0);
  CHECK(roll_span <= 45.0 + 1e-9);
  CHECK(pitch_span > 85.0);
  CHECK(yaw_span > 85.0);
  CHECK(x_span > 0.009);
}

TEST_CASE("hold-only plan without wander is all identity") {
  TrajectoryConfig cfg;
  cfg.n_samples = 6;
  cfg.wander = false;
  cfg.segments = {{SegmentKind::kHold, 1.0, 0.0}, {SegmentKind::kHold, 1.0, 0.0}};
  auto traj = generate_trajectory(cfg, 5);
  REQUIRE(traj.size() == 6);
  for (const auto& tp : traj) {
    CHECK(tp.pose.roll == 0.0);
    CHECK(tp.pose.pitch == 0.0);
    CHECK(tp.pose.yaw == 0.0);
    CHECK(tp.pose.x == 0.0);
  }
}

TEST_CASE("motion is slow at the default rate") {
  // Slew between consecutive samples stays small for any wander draw.
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    TrajectoryConfig cfg;
    cfg.segments = TrajectoryConfig::default_plan();
    auto traj = generate_trajectory(cfg, seed);
    // The roll ramp peaks at just over 1 degree per sample and wander can
    // add about half a degree; the faster 90-degree bends stay under 2.5.
    CHECK(max_step(traj, &Pose::roll) < 2.0);
    CHECK(max_step(traj, &Pose::pitch) < 2.5);
    CHECK(max_step(traj, &Pose::yaw) < 2.5);
    CHECK(max_step(traj, &Pose::x) < 0.001);
  }
}

TEST_CASE("range of motion is honored for many wander draws") {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    TrajectoryConfig cfg;
    cfg.segments = TrajectoryConfig::default_plan();
    auto traj = generate_trajectory(cfg, seed);
    for (const auto& tp : traj) {
      REQUIRE(within_rom(tp.pose));
    }
  }
}

TEST_CASE("wander amplitude bounds hold during neutral holds") {
  TrajectoryConfig cfg;
  cfg.segments = {{SegmentKind::kHold, 1.0, 0.0},
                  {SegmentKind::kHold, 1.0, 0.0},
                  {SegmentKind::kHold, 1.0, 0.0}};
  cfg.n_samples = 300;
  cfg.wander_angle_deg = 2.0;
  cfg.wander_translation = 0.001;
  auto traj = generate_trajectory(cfg, 9);
  double worst_angle = 0.0, worst_shift = 0.0, peak = 0.0;
  for (const auto& tp : traj) {
    worst_angle = std::max({worst_angle, std::abs(tp.pose.roll),
                            std::abs(tp.pose.pitch), std::abs(tp.pose.yaw)});
    worst_shift = std::max({worst_shift, std::abs(tp.pose.x),
                            std::abs(tp.pose.y), std::abs(tp.pose.z)});
    peak = std::max(peak, std::abs(tp.pose.roll));
  }
  CHECK(worst_angle <= 2.0 + 1e-12);
  CHECK(worst_shift <= 0.001 + 1e-15);
  CHECK(peak > 0.1);  // wander actually moves the joint
}

TEST_CASE("generation is deterministic in the seed") {
  TrajectoryConfig cfg;
  cfg.segments = TrajectoryConfig::default_plan();
  auto a = generate_trajectory(cfg, 77);
  auto b = generate_trajectory(cfg, 77);
  auto c = generate_trajectory(cfg, 78);
  REQUIRE(a.size() == b.size());
  bool identical = true;
  for (size_t i = 0; i < a.size(); ++i) {
    identical = identical && a[i].pose.roll == b[i].pose.roll &&
                a[i].pose.x == b[i].pose.x && a[i].t == b[i].t;
  }
  CHECK(identical);
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) {
    differs = differs || a[i].pose.roll != c[i].pose.roll;
  }
  CHECK(differs);
}

TEST_CASE("invalid plans are rejected") {
  TrajectoryConfig cfg;
  cfg.segments = TrajectoryConfig::default_plan();
  cfg.n_samples = 3;  // fewer samples than segments
  CHECK_THROWS_AS(generate_trajectory(cfg, 1), ConfigError);

  TrajectoryConfig bad_weight;
  bad_weight.segments = {{SegmentKind::kHold, 0.0, 0.0}};
  CHECK_THROWS_AS(generate_trajectory(bad_weight, 1), ConfigError);

  TrajectoryConfig over_rom;
  over_rom.segments = {{SegmentKind::kRollSweep, 1.0, 46.0}};
  CHECK_THROWS_AS(generate_trajectory(over_rom, 1), ConfigError);

  TrajectoryConfig over_push;
  over_push.segments = {{SegmentKind::kPushPull, 1.0, 0.013}};
  CHECK_THROWS_AS(generate_trajectory(over_push, 1), ConfigError);

  // An empty plan is not an error: it falls back to the default plan.
  TrajectoryConfig empty;
  empty.segments = {};
  empty.n_samples = 60;
  CHECK(generate_trajectory(empty, 1).size() == 60);

  // Push-pull amplitude plus wander headroom must fit inside the
  // translation limit.
  TrajectoryConfig tight;
  tight.segments = {{SegmentKind::kHold, 0.1, 0.0},
                    {SegmentKind::kPushPull, 1.0, 0.010},
                    {SegmentKind::kHold, 0.1, 0.0}};
  tight.wander_translation = 0.005;
  CHECK_THROWS_AS(generate_trajectory(tight, 1), ConfigError);
}

TEST_CASE("sweep profile visits both extremes and returns") {
  TrajectoryConfig cfg;
  cfg.wander = false;
  cfg.n_samples = 400;
  cfg.segments = {{SegmentKind::kPitchSweep, 1.0, 90.0}};
  auto traj = generate_trajectory(cfg, 3);
  double lo = 0.0, hi = 0.0;
  for (const auto& tp : traj) {
    lo = std::min(lo, tp.pose.pitch);
    hi = std::max(hi, tp.pose.pitch);
    CHECK(tp.pose.roll == 0.0);
    CHECK(tp.pose.yaw == 0.0);
  }
  CHECK(hi == doctest::Approx(90.0).epsilon(0.01));
  CHECK(lo == doctest::Approx(-90.0).epsilon(0.01));
  CHECK(std::abs(traj.back().pose.pitch) < 1.0);
  CHECK(std::abs(traj.front().pose.pitch) < 1e-12);
}
