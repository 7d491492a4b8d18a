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

#include <sstream>

#include "proprio/common.hpp"
#include "proprio/config.hpp"

using namespace proprio;

TEST_CASE("defaults are present and typed") {
  Config cfg;
  CHECK(cfg.get_u64("seed.master") == 42);
  CHECK(cfg.get_int("sim.samples") == 1263);
  CHECK(cfg.get_double("sim.period") == 0.1);
  CHECK(cfg.get_bool("sim.wander"));
  CHECK_FALSE(cfg.get_bool("sim.drift"));
  CHECK(cfg.get_int("train.epochs") == 100);
  CHECK(cfg.get_double("train.learning_rate") == 0.001);
  CHECK(cfg.get_string("targets.mode") == "radians_meters");
  CHECK(cfg.get_string("attr.criterion") == "twist");
}

TEST_CASE("file grammar: sections of key = value with comments") {
  std::stringstream file(R"(# pipeline options
seed.master = 7

# noise block
sim.noise_sigma = 0.02   # trailing comment
sim.wander = false
attr.criterion = bend
)");
  Config cfg;
  cfg.load_stream(file, "inline");
  CHECK(cfg.get_u64("seed.master") == 7);
  CHECK(cfg.get_double("sim.noise_sigma") == 0.02);
  CHECK_FALSE(cfg.get_bool("sim.wander"));
  CHECK(cfg.get_string("attr.criterion") == "bend");
  // Untouched keys keep their defaults.
  CHECK(cfg.get_int("sim.samples") == 1263);
}

TEST_CASE("unknown keys are rejected everywhere") {
  Config cfg;
  CHECK_THROWS_AS(cfg.set("sim.velocity", "3"), ConfigError);
  // Reading an unregistered key is a caller bug, not a user error.
  CHECK_THROWS_AS(cfg.get_string("sim.velocity"), InvariantError);
  std::stringstream file("sim.velocity = 3\n");
  Config cfg2;
  CHECK_THROWS_AS(cfg2.load_stream(file, "inline"), ConfigError);
}

TEST_CASE("malformed lines are rejected with the right type") {
  Config cfg;
  std::stringstream no_eq("sim.samples 1263\n");
  CHECK_THROWS_AS(cfg.load_stream(no_eq, "inline"), ConfigError);
  std::stringstream bad_type("sim.samples = eleven\n");
  Config cfg2;
  cfg2.load_stream(bad_type, "inline");
  CHECK_THROWS_AS(cfg2.get_int("sim.samples"), ConfigError);
  Config cfg3;
  cfg3.set("sim.wander", "perhaps");
  CHECK_THROWS_AS(cfg3.get_bool("sim.wander"), ConfigError);
}

TEST_CASE("set overrides and is_derived bookkeeping") {
  Config cfg;
  CHECK(cfg.is_derived("split.seed"));
  cfg.set("split.seed", "1234");
  CHECK_FALSE(cfg.is_derived("split.seed"));
  CHECK(cfg.get_u64("split.seed") == 1234);
  CHECK(cfg.is_derived("ablate.seeds"));
  cfg.set("sim.samples", "99");
  CHECK(cfg.get_int("sim.samples") == 99);
  CHECK(cfg.has("sim.samples"));
}

TEST_CASE("seed lists parse and reject duplicates") {
  Config cfg;
  cfg.set("ablate.seeds", "3, 5, 8");
  auto seeds = cfg.get_seed_list("ablate.seeds");
  REQUIRE(seeds.size() == 3);
  CHECK(seeds[0] == 3);
  CHECK(seeds[1] == 5);
  CHECK(seeds[2] == 8);
  cfg.set("attr.seeds", "4,4");
  CHECK_THROWS_AS(cfg.get_seed_list("attr.seeds"), ConfigError);
  cfg.set("attr.seeds", "nope");
  CHECK_THROWS_AS(cfg.get_seed_list("attr.seeds"), ConfigError);
}

TEST_CASE("entries expose the full expanded table") {
  Config cfg;
  cfg.set("train.epochs", "17");
  auto entries = cfg.entries();
  bool saw_epochs = false, saw_master = false;
  for (const auto& [key, value] : entries) {
    if (key == "train.epochs") {
      saw_epochs = true;
      CHECK(value == "17");
    }
    if (key == "seed.master") {
      saw_master = true;
      CHECK(value == "42");
    }
  }
  CHECK(saw_epochs);
  CHECK(saw_master);
}
