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

// End-to-end checks of the installed command-line surface: argument
// parsing, config overrides, exit codes, and the files each subcommand
// leaves behind. The binary path is injected by the build.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef PROPRIO_CLI_PATH
#error "PROPRIO_CLI_PATH must point at the proprio binary"
#endif

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(PROPRIO_CLI_PATH) + " " + args + " 2>&1";
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof(buf), pipe) != nullptr) {
    result.output += buf;
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("proprio_cli_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("help exits cleanly and names every subcommand") {
  RunResult r = run_cli("--help");
  CHECK(r.exit_code == 0);
  for (const char* sub :
       {"simulate", "train", "ablate", "attribute", "repro"}) {
    CHECK(contains(r.output, sub));
  }
  CHECK(run_cli("simulate --help").exit_code == 0);
}

TEST_CASE("missing or unknown subcommands are parse errors") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
}

TEST_CASE("config mistakes exit with code 2 and a readable message") {
  TempDir tmp("cfgerr");
  RunResult unknown =
      run_cli("simulate --no.such.key 1 --out " + tmp.str());
  CHECK(unknown.exit_code == 2);
  CHECK(contains(unknown.output, "no.such.key"));

  RunResult missing_file =
      run_cli("simulate --config /nonexistent.cfg --out " + tmp.str());
  CHECK(missing_file.exit_code == 2);

  RunResult bare = run_cli("simulate --sim.samples --out " + tmp.str());
  CHECK(bare.exit_code == 2);  // override flag without a value
}

TEST_CASE("simulate writes the dataset and manifest") {
  TempDir tmp("sim");
  RunResult r =
      run_cli("simulate --samples 40 --seed 5 --out " + tmp.str());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(tmp.path / "dataset.csv"));
  CHECK(fs::exists(tmp.path / "manifest.json"));

  std::ifstream csv(tmp.path / "dataset.csv");
  int lines = 0;
  std::string line;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 41);  // header plus one row per sample
}

TEST_CASE("train consumes a simulated dataset end to end") {
  TempDir tmp("train");
  REQUIRE(run_cli("simulate --samples 40 --seed 5 --out " + tmp.str())
              .exit_code == 0);
  RunResult r = run_cli("train " + tmp.str() + "/dataset.csv --epochs 1 " +
                        "--train.batch_size 8 --out " + tmp.str());
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "test loss"));
  for (const char* f : {"checkpoint.txt", "loss_curve.csv", "error_stats.csv",
                        "loss_curve.svg", "manifest.json"}) {
    CHECK(fs::exists(tmp.path / f));
  }
}

TEST_CASE("train on a missing dataset is a config error") {
  TempDir tmp("nods");
  RunResult r = run_cli("train " + tmp.str() + "/absent.csv --out " +
                        tmp.str());
  CHECK(r.exit_code == 2);
  CHECK(run_cli("train").exit_code == 2);  // dataset argument is required
}

TEST_CASE("attribute rejects an unknown criterion") {
  TempDir tmp("crit");
  REQUIRE(run_cli("simulate --samples 40 --seed 5 --out " + tmp.str())
              .exit_code == 0);
  RunResult r = run_cli("attribute " + tmp.str() +
                        "/dataset.csv --criterion shear --out " + tmp.str());
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "criterion"));
}

TEST_CASE("equals-style overrides parse the same as spaced ones") {
  TempDir a("eq_a");
  TempDir b("eq_b");
  REQUIRE(run_cli("simulate --sim.samples=40 --seed 5 --out " + a.str())
              .exit_code == 0);
  REQUIRE(run_cli("simulate --sim.samples 40 --seed 5 --out " + b.str())
              .exit_code == 0);
  std::ifstream fa(a.path / "dataset.csv"), fb(b.path / "dataset.csv");
  std::string ca((std::istreambuf_iterator<char>(fa)),
                 std::istreambuf_iterator<char>());
  std::string cb((std::istreambuf_iterator<char>(fb)),
                 std::istreambuf_iterator<char>());
  CHECK(ca == cb);
  CHECK(!ca.empty());
}
