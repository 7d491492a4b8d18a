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

#ifndef PROPRIO_CONFIG_HPP_
#define PROPRIO_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace proprio {

// Line-oriented `section.key = value` configuration with a closed key set.
// Every key has a typed default; unknown keys are user errors. `#` starts
// a comment, blank lines are skipped.
class Config {
 public:
  Config();  // all defaults

  void load_file(const std::string& path);
  void load_stream(std::istream& in, const std::string& origin);

  // Unknown key or empty value -> ConfigError.
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  int get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;

  // For "derived"-able seed keys: nullopt-style check.
  bool is_derived(const std::string& key) const;

  // Comma-separated unsigned seed list; ConfigError on duplicates.
  std::vector<std::uint64_t> get_seed_list(const std::string& key) const;

  // Full key -> value snapshot, for manifests.
  const std::map<std::string, std::string>& entries() const {
    return values_;
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace proprio

#endif  // PROPRIO_CONFIG_HPP_
