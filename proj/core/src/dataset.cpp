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

#include "proprio/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "proprio/rng.hpp"

namespace proprio {

namespace {

std::string csv_header() {
  std::string h = "t";
  for (int b = 0; b < kNumBoards; ++b) {
    for (int i = 0; i < kSensorsPerBoard; ++i) {
      h += ",adc" + std::to_string(b) + "_data" + std::to_string(i);
    }
  }
  h += ",x,y,z,roll,pitch,yaw";
  return h;
}

std::string format_double(double v) {
  // %.17g guarantees read-back reproduces the exact double, so a write/read
  // cycle is a true identity rather than a near-miss.
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void parse_fail(int line, const std::string& why) {
  throw ParseError("csv line " + std::to_string(line) + ": " + why);
}

double parse_double(const std::string& field, int line) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    parse_fail(line, "bad number '" + field + "'");
  }
  return v;
}

int parse_count(const std::string& field, int line) {
  int v = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    parse_fail(line, "bad count '" + field + "'");
  }
  if (v < 0 || v > kAdcCeiling) {
    parse_fail(line, "count " + std::to_string(v) + " outside [0, " +
                         std::to_string(kAdcCeiling) + "]");
  }
  return v;
}

std::vector<std::string> split_fields(const std::string& row) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = row.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(row.substr(start));
      break;
    }
    fields.push_back(row.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

void check_record(const Record& r, const char* what) {
  if (!r.pose.finite() || !std::isfinite(r.t)) {
    throw InvariantError(std::string(what) + ": non-finite record");
  }
  for (int c : r.counts) {
    if (c < 0 || c > kAdcCeiling) {
      throw InvariantError(std::string(what) + ": count outside ADC range");
    }
  }
}

}  // namespace

Records to_records(const std::vector<SimSample>& samples) {
  Records out;
  out.reserve(samples.size());
  for (const SimSample& s : samples) {
    Record r;
    r.t = s.t;
    r.counts = s.counts;
    r.pose = s.recorded_pose;
    out.push_back(r);
  }
  return out;
}

void write_csv(const Records& records, std::ostream& out) {
  out << csv_header() << '\n';
  for (const Record& r : records) {
    check_record(r, "write_csv");
    out << format_double(r.t);
    for (int c : r.counts) {
      out << ',' << c;
    }
    out << ',' << format_double(r.pose.x) << ',' << format_double(r.pose.y)
        << ',' << format_double(r.pose.z) << ',' << format_double(r.pose.roll)
        << ',' << format_double(r.pose.pitch) << ','
        << format_double(r.pose.yaw) << '\n';
  }
}

void write_csv(const Records& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot open for writing: " + path);
  }
  write_csv(records, out);
  if (!out) {
    throw ConfigError("write failed: " + path);
  }
}

Records read_csv(std::istream& in) {
  std::string row;
  if (!std::getline(in, row)) {
    throw ParseError("csv line 1: empty file");
  }
  if (!row.empty() && row.back() == '\r') row.pop_back();
  if (row != csv_header()) {
    parse_fail(1, "header mismatch");
  }

  Records out;
  int line = 1;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    const std::vector<std::string> fields = split_fields(row);
    if (static_cast<int>(fields.size()) != 1 + kNumSensors + kNumAxes) {
      parse_fail(line, "expected " +
                           std::to_string(1 + kNumSensors + kNumAxes) +
                           " fields, got " + std::to_string(fields.size()));
    }
    Record r;
    r.t = parse_double(fields[0], line);
    for (int i = 0; i < kNumSensors; ++i) {
      r.counts[static_cast<std::size_t>(i)] = parse_count(fields[1 + i], line);
    }
    r.pose.x = parse_double(fields[1 + kNumSensors + 0], line);
    r.pose.y = parse_double(fields[1 + kNumSensors + 1], line);
    r.pose.z = parse_double(fields[1 + kNumSensors + 2], line);
    r.pose.roll = parse_double(fields[1 + kNumSensors + 3], line);
    r.pose.pitch = parse_double(fields[1 + kNumSensors + 4], line);
    r.pose.yaw = parse_double(fields[1 + kNumSensors + 5], line);
    if (!r.pose.finite() || !std::isfinite(r.t)) {
      parse_fail(line, "non-finite value");
    }
    out.push_back(r);
  }
  return out;
}

Records read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open for reading: " + path);
  }
  return read_csv(in);
}

Split make_split(int n, double test_fraction, std::uint64_t seed) {
  if (n < 5) {
    throw ConfigError("split: need at least 5 records");
  }
  if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
    throw ConfigError("split: test fraction must lie in (0, 1)");
  }
  const int n_test = static_cast<int>(std::lround(test_fraction * n));
  if (n_test < 1 || n_test >= n) {
    throw ConfigError("split: test fraction leaves an empty side");
  }

  std::vector<std::size_t> order =
      rng::shuffled_indices(static_cast<std::size_t>(n), seed);
  Split s;
  s.test_fraction = test_fraction;
  s.seed = seed;
  for (int i = 0; i < n; ++i) {
    const int idx = static_cast<int>(order[static_cast<std::size_t>(i)]);
    if (i < n_test) {
      s.test.push_back(idx);
    } else {
      s.train.push_back(idx);
    }
  }
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

const char* near_limit_name(NearLimit criterion) {
  switch (criterion) {
    case NearLimit::kTwist:
      return "twist";
    case NearLimit::kBend:
      return "bend";
    case NearLimit::kPushPull:
      return "push_pull";
  }
  return "?";
}

bool near_limit_match(const Pose& pose, NearLimit criterion) {
  switch (criterion) {
    case NearLimit::kTwist:
      return std::abs(pose.roll) > 20.0;
    case NearLimit::kBend:
      return std::abs(pose.pitch) > 70.0 || std::abs(pose.yaw) > 70.0;
    case NearLimit::kPushPull:
      return std::abs(pose.x) > 0.002;
  }
  return false;
}

Records filter_near_limit(const Records& records, NearLimit criterion) {
  Records out;
  for (const Record& r : records) {
    if (near_limit_match(r.pose, criterion)) {
      out.push_back(r);
    }
  }
  return out;
}

const char* target_scale_name(TargetScale scale) {
  return scale == TargetScale::kPaperRaw ? "paper_raw" : "radians_meters";
}

Standardizer Standardizer::fit(const Records& records,
                               const std::vector<int>& train_indices,
                               TargetScale scale) {
  if (train_indices.empty()) {
    throw ConfigError("standardizer: empty training split");
  }
  const auto n = static_cast<double>(train_indices.size());
  Standardizer s;
  s.target_scale = scale;
  for (int c = 0; c < kNumSensors; ++c) {
    double sum = 0.0;
    for (int idx : train_indices) {
      sum += records[static_cast<std::size_t>(idx)]
                 .counts[static_cast<std::size_t>(c)];
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (int idx : train_indices) {
      const double d = records[static_cast<std::size_t>(idx)]
                           .counts[static_cast<std::size_t>(c)] -
                       mean;
      ss += d * d;
    }
    const double var = train_indices.size() > 1 ? ss / (n - 1.0) : 0.0;
    s.mean[c] = mean;
    s.stddev[c] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& raw) const {
  if (raw.cols() != kNumSensors) {
    throw InvariantError("standardizer: input width mismatch");
  }
  Matrix out = raw;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() /= stddev.transpose().array();
  return out;
}

Matrix Standardizer::target_matrix(const Records& records,
                                   const std::vector<int>& indices) const {
  const double ascale =
      target_scale == TargetScale::kRadiansMeters ? kDegToRad : 1.0;
  Matrix y(static_cast<Eigen::Index>(indices.size()), kNumAxes);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const Pose& p = records[static_cast<std::size_t>(indices[i])].pose;
    const auto r = static_cast<Eigen::Index>(i);
    y(r, 0) = p.x;
    y(r, 1) = p.y;
    y(r, 2) = p.z;
    y(r, 3) = p.roll * ascale;
    y(r, 4) = p.pitch * ascale;
    y(r, 5) = p.yaw * ascale;
  }
  return y;
}

Matrix Standardizer::to_output_units(const Matrix& targets) const {
  if (targets.cols() != kNumAxes) {
    throw InvariantError("standardizer: target width mismatch");
  }
  Matrix out = targets;
  if (target_scale == TargetScale::kRadiansMeters) {
    out.col(3) *= kRadToDeg;
    out.col(4) *= kRadToDeg;
    out.col(5) *= kRadToDeg;
  }
  return out;
}

Matrix input_matrix(const Records& records, const std::vector<int>& indices) {
  Matrix x(static_cast<Eigen::Index>(indices.size()), kNumSensors);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const Record& r = records[static_cast<std::size_t>(indices[i])];
    for (int c = 0; c < kNumSensors; ++c) {
      x(static_cast<Eigen::Index>(i), c) =
          r.counts[static_cast<std::size_t>(c)];
    }
  }
  return x;
}

std::vector<int> all_indices(int n) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  return idx;
}

ModelData prepare_model_data(const Records& records, const Split& split,
                             TargetScale scale) {
  ModelData d;
  d.standardizer = Standardizer::fit(records, split.train, scale);
  d.x_train = d.standardizer.apply(input_matrix(records, split.train));
  d.x_test = d.standardizer.apply(input_matrix(records, split.test));
  d.y_train = d.standardizer.target_matrix(records, split.train);
  d.y_test = d.standardizer.target_matrix(records, split.test);
  return d;
}

}  // namespace proprio
