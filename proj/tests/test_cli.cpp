// Copyright 2026 The qcollapse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qcollapse/trajectory_io.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QCOLLAPSE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "qcollapse_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("list-scenarios") { CHECK(run_cli("list-scenarios") == 0); }

  TEST_CASE("run on compton_null writes empty event arrays") {
    auto out = scratch("compton.jsonl");
    REQUIRE(run_cli("run --scenario compton_null --trials 5 --seed 1 --out " + out.string()) == 0);
    std::ifstream in(out);
    auto trs = qcollapse::read_trajectories(in);
    REQUIRE(trs.size() == 5);
    for (const auto& t : trs) CHECK(t.record.events.empty());
    CHECK(slurp(out).find("\"events\":[]") != std::string::npos);
  }

  TEST_CASE("stats on serial_counter reports no ordering violations") {
    auto traj = scratch("serial.jsonl");
    auto csv = scratch("serial.csv");
    REQUIRE(run_cli("run --scenario serial_counter --trials 200 --seed 4 --out " + traj.string()) == 0);
    REQUIRE(run_cli("stats --in " + traj.string() + " --out " + csv.string()) == 0);
    const auto text = slurp(csv);
    CHECK(text.find("ordering,violations,,,0") != std::string::npos);
    CHECK(text.find("first_hit,bin_49,") != std::string::npos);
    CHECK(text.find("events,variance,,,") != std::string::npos);
  }

  TEST_CASE("verify on const_hazard passes") {
    auto csv = scratch("verify.csv");
    CHECK(run_cli("verify --scenario const_hazard --param lambda=2 --trials 100000 --out " + csv.string()) == 0);
    CHECK(slurp(csv).find("const_hazard,100000,") != std::string::npos);
  }

  TEST_CASE("identical runs are byte-identical, also via a saved manifest") {
    auto a = scratch("a.jsonl"), b = scratch("b.jsonl"), c = scratch("c.jsonl"), m = scratch("m.json");
    const std::string args = "run --scenario multi_sequence --trials 300 --seed 77 --collapse-mode projected";
    REQUIRE(run_cli(args + " --out " + a.string() + " --save-manifest " + m.string()) == 0);
    REQUIRE(run_cli(args + " --out " + b.string()) == 0);
    REQUIRE(run_cli("run --manifest " + m.string() + " --out " + c.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) == slurp(c));
    CHECK_FALSE(slurp(a).empty());
  }

  TEST_CASE("export then run from a scenario file") {
    auto file = scratch("capture.json");
    REQUIRE(run_cli("export --scenario capture --out " + file.string()) == 0);
    CHECK(run_cli("run --scenario " + file.string() + " --trials 3") == 0);
  }

  TEST_CASE("input errors exit with 2") {
    CHECK(run_cli("run --scenario no_such_thing") == 2);
    CHECK(run_cli("run --scenario capture --dt -1") == 2);
    CHECK(run_cli("run --scenario capture --collapse-mode sideways") == 2);
    CHECK(run_cli("run --scenario capture --param bogus=1") == 2);
    CHECK(run_cli("bogus") == 2);
    auto empty = scratch("empty.json");
    std::ofstream(empty).close();
    CHECK(run_cli("run --scenario " + empty.string()) == 2);
    CHECK(run_cli("stats --in " + scratch("missing.jsonl").string()) == 2);
  }

  TEST_CASE("verification failure exits with 1") {
    // Fifty trials cannot meet the 0.02 histogram distance gate.
    CHECK(run_cli("verify --scenario const_hazard --trials 50 --seed 1") == 1);
    // A hazard cap violation asks for a smaller dt: bad input.
    CHECK(run_cli("verify --scenario const_hazard --param lambda=100 --dt 0.01 --trials 10") == 2);
  }
}
