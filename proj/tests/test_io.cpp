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

#include <sstream>

#include "qcollapse/scenario_io.hpp"
#include "qcollapse/scenarios.hpp"
#include "qcollapse/trajectory_io.hpp"

using namespace qcollapse;

namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

const char* kTwoLevel = R"({
  "id": "two",
  "basis": ["a", "b"],
  "components": [
    {"id": 0, "label": "A", "indices": ["a"], "status": "realized"},
    {"id": 1, "label": "B", "indices": ["b"], "status": "ready"}
  ],
  "edges": [{"from": "A", "to": "B", "periodic": false, "couplings": [{"row": "b", "col": "a", "re": 1.0, "im": 0.0}]}],
  "initial": [{"index": "a", "re": 1.0, "im": 0.0}],
  "metadata": {"dt": 0.01, "t_max": 5}
})";

std::string with(std::string text, const std::string& from, const std::string& to) {
  auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST_SUITE("scenario_io") {
  TEST_CASE("every builtin round-trips field by field") {
    for (const auto& id : builtin_ids()) {
      CAPTURE(id);
      auto s = build_builtin(id);
      auto text = serialize_scenario(s);
      auto back = parse_scenario(text);
      CHECK(back.id == s.id);
      CHECK(back.basis == s.basis);
      CHECK(back.hamiltonian == s.hamiltonian);
      CHECK(back.graph == s.graph);
      CHECK(back.initial.amplitudes == s.initial.amplitudes);
      CHECK(back.metadata == s.metadata);
      CHECK(back.synthetic_hazards == s.synthetic_hazards);
      CHECK(back == s);
      CHECK(serialize_scenario(back) == text);
    }
  }

  TEST_CASE("shipped capture file equals the builder") {
    CHECK(load_scenario(QCOLLAPSE_SOURCE_DIR "/scenarios/capture.qrs") == build_capture(1.0));
  }

  TEST_CASE("minimal document with integer and label references") {
    auto s = parse_scenario(kTwoLevel);
    CHECK(s.dimension() == 2);
    CHECK(s.hamiltonian.entries().size() == 2);
    CHECK(launch_set(s.graph) == std::vector<int>{1});
    auto ints = parse_scenario(with(with(kTwoLevel, R"("indices": ["b"])", R"("indices": [1])"), R"("from": "A")",
                                    R"("from": 0)"));
    CHECK(ints == s);
  }

  TEST_CASE("empty and malformed documents are syntax errors with positions") {
    try {
      parse_scenario("");
      FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
      CHECK(e.code() == ErrorCode::SyntaxError);
      CHECK(e.line() == 1);
    }
    try {
      parse_scenario("{\n  \"id\": \"x\",\n  \"basis\": [\"a\",, \"b\"]\n}");
      FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
      CHECK(e.line() == 3);
      CHECK(e.column() >= 15);
    }
    try {
      parse_scenario(with(kTwoLevel, R"("basis": ["a", "b"])", R"("basis": "ab")"));
      FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
      CHECK(e.line() == 3);
    }
  }

  TEST_CASE("two components sharing a basis label") {
    auto text = with(kTwoLevel, R"("indices": ["b"])", R"("indices": ["a"])");
    try {
      parse_scenario(text);
      FAIL("expected OverlappingComponents");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OverlappingComponents);
      CHECK(std::string(e.what()).find("'a'") != std::string::npos);
    }
  }

  TEST_CASE("semantic errors") {
    CHECK(code_of([] { parse_scenario(with(kTwoLevel, R"("col": "a")", R"("col": "zz")")); }) ==
          ErrorCode::UnknownLabel);
    CHECK(code_of([] { parse_scenario(with(kTwoLevel, R"("to": "B")", R"("to": "Q")")); }) == ErrorCode::UnknownLabel);
    CHECK(code_of([] { parse_scenario(with(kTwoLevel, R"("status": "realized")", R"("status": "ready")")); }) ==
          ErrorCode::NoRealizedComponent);
    // Same element twice with values that are not conjugate.
    CHECK(code_of([] {
            parse_scenario(with(kTwoLevel, R"("initial")",
                                R"("hamiltonian": [{"row": "a", "col": "b", "re": 1.0, "im": 0.5}], "initial")"));
          }) == ErrorCode::NonHermitianCoupling);
    CHECK(code_of([] {
            parse_scenario(with(kTwoLevel, R"("initial")",
                                R"("hamiltonian": [{"row": "a", "col": "a", "re": 1.0, "im": 0.5}], "initial")"));
          }) == ErrorCode::NonHermitianCoupling);
    // Initial weight outside the realized component.
    CHECK(code_of([] { parse_scenario(with(kTwoLevel, R"("index": "a")", R"("index": "b")")); }) ==
          ErrorCode::InvalidArgument);
  }
}

TEST_SUITE("trajectory_io") {
  TEST_CASE("lines round-trip and stats summarize") {
    auto s = build_serial_counter(3);
    EngineConfig cfg = default_config(s);
    cfg.seed = 9;
    std::vector<TrajectoryRecord> recs;
    run_ensemble(s, cfg, 40, &recs);
    std::stringstream io;
    for (std::size_t i = 0; i < recs.size(); ++i) io << trajectory_line(s, i, recs[i]) << "\n";
    auto back = read_trajectories(io);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(back[i].index == i);
      CHECK(back[i].record == recs[i]);
    }
    auto table = trajectory_stats(back, cfg.t_max, &s.graph);
    CHECK(table.find("ordering", "violations") == 0.0);
    CHECK(table.find("trials", "count") == 40.0);
    CHECK(table.find("final_label", "C3").value_or(0.0) > 0.0);
    int bins = 0;
    double hist = 0.0;
    for (const auto& r : table.rows) {
      if (r.section == "first_hit") {
        hist += r.value;
        if (r.key.rfind("bin_", 0) == 0) ++bins;
      }
    }
    CHECK(bins == kStatsBins);
    CHECK(hist == 40.0);
    std::ostringstream csv;
    table.write_csv(csv);
    CHECK(csv.str().rfind("section,key,lo,hi,value\n", 0) == 0);
  }

  TEST_CASE("malformed trajectory lines name the record") {
    std::stringstream io("\n{\"scenario\": 1}\n");
    try {
      read_trajectories(io);
      FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
      CHECK(e.line() == 2);
    }
  }

  TEST_CASE("manifest round-trip and deterministic output") {
    RunManifest m;
    m.scenario = "parallel";
    m.trials = 25;
    m.config = default_config(build_parallel());
    m.config.seed = 31;
    m.config.collapse_mode = CollapseMode::Projected;
    m.config.max_collapses = 5;
    auto back = RunManifest::from_json(m.to_json());
    CHECK(back.to_json() == m.to_json());
    std::ostringstream a, b;
    write_run(m, a);
    write_run(back, b);
    CHECK(a.str() == b.str());
    CHECK_THROWS_AS(RunManifest::from_json("{"), SyntaxError);
  }
}
