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

#ifndef PROPRIO_COMMON_HPP_
#define PROPRIO_COMMON_HPP_

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace proprio {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

// User or configuration mistakes: bad config keys, unreadable files,
// out-of-range values. Mapped to process exit code 2 by the CLI.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed data encountered while parsing an input file.
class ParseError : public ConfigError {
 public:
  explicit ParseError(const std::string& what) : ConfigError(what) {}
};

// Broken internal contract. Mapped to exit code 3 by the CLI.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

inline constexpr int kNumSensors = 60;
inline constexpr int kNumBoards = 4;
inline constexpr int kSensorsPerBoard = 15;
inline constexpr int kNumAxes = 6;

}  // namespace proprio

#endif  // PROPRIO_COMMON_HPP_
