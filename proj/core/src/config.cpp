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

#include "proprio/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "proprio/common.hpp"

namespace proprio {

namespace {

// The complete key table. Values are the textual defaults; README carries
// the semantics. Seed-like keys accept "derived" to mean "mix from the
// master seed".
const std::map<std::string, std::string>& default_table() {
  static const std::map<std::string, std::string> defaults = {
      {"seed.master", "42"},
      {"capsule.layout_seed", "7"},
      {"sim.samples", "1263"},
      {"sim.period", "0.1"},
      {"sim.wander", "true"},
      {"sim.wander_angle_deg", "3.0"},
      {"sim.wander_translation", "0.0015"},
      {"sim.failed_sensors", "20"},
      {"sim.drift", "false"},
      {"sim.noise_sigma", "0.01"},
      {"sim.gain", "8.0"},
      {"sim.rest_voltage", "1.65"},
      {"split.fraction", "0.2"},
      {"split.seed", "derived"},
      {"targets.mode", "radians_meters"},
      {"train.learning_rate", "0.001"},
      {"train.batch_size", "32"},
      {"train.epochs", "100"},
      {"train.beta1", "0.9"},
      {"train.beta2", "0.999"},
      {"train.epsilon", "1e-8"},
      {"ablate.trials", "10"},
      {"ablate.shuffles", "10"},
      {"ablate.seeds", "derived"},
      {"ablate.magnify_errorbars", "1.0"},
      {"attr.trials", "5"},
      {"attr.permutations", "200"},
      {"attr.background", "100"},
      {"attr.criterion", "twist"},
      {"attr.seeds", "derived"},
  };
  return defaults;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* want) {
  throw ConfigError("config key '" + key + "': cannot parse '" + value +
                    "' as " + want);
}

}  // namespace

Config::Config() : values_(default_table()) {}

void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  load_stream(in, path);
}

void Config::load_stream(std::istream& in, const std::string& origin) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'section.key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
}

void Config::set(const std::string& key, const std::string& value) {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("unknown config key '" + key + "'");
  }
  if (value.empty()) {
    throw ConfigError("config key '" + key + "': empty value");
  }
  it->second = value;
}

bool Config::has(const std::string& key) const {
  return values_.count(key) != 0;
}

std::string Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw InvariantError("config: lookup of unregistered key '" + key + "'");
  }
  return it->second;
}

int Config::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    bad_value(key, v, "an integer");
  }
  return out;
}

double Config::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    bad_value(key, v, "a number");
  }
  return out;
}

bool Config::get_bool(const std::string& key) const {
  std::string v = get_string(key);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, get_string(key), "a boolean");
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const std::string v = get_string(key);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    bad_value(key, v, "an unsigned integer");
  }
  return out;
}

bool Config::is_derived(const std::string& key) const {
  return get_string(key) == "derived";
}

std::vector<std::uint64_t> Config::get_seed_list(const std::string& key) const {
  const std::string v = get_string(key);
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) {
      throw ConfigError("config key '" + key + "': empty seed in list");
    }
    std::uint64_t s = 0;
    const auto [ptr, ec] =
        std::from_chars(item.data(), item.data() + item.size(), s);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      bad_value(key, v, "a comma-separated seed list");
    }
    seeds.push_back(s);
  }
  if (seeds.empty()) {
    throw ConfigError("config key '" + key + "': empty seed list");
  }
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) {
    throw ConfigError("config key '" + key + "': duplicate seeds");
  }
  return seeds;
}

}  // namespace proprio
