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

#include <fstream>
#include <set>

#include <json.hpp>

#include "qcollapse/engine.hpp"
#include "qcollapse/scenarios.hpp"

using namespace qcollapse;

namespace {

int by_label(const ComponentGraph& g, const std::string& label) {
  for (const auto& c : g.components) {
    if (c.label == label) return c.id;
  }
  throw std::runtime_error("no " + label);
}

double binomial_sigma(double n, double p) { return std::sqrt(n * p * (1.0 - p)); }

std::vector<Index> indices_where(const ScenarioSpec& s, const std::string& needle) {
  std::vector<Index> out;
  for (std::size_t i = 0; i < s.basis.size(); ++i) {
    if (s.basis[i].find(needle) != std::string::npos) out.push_back(static_cast<Index>(i));
  }
  return out;
}

}  // namespace

TEST_SUITE("scenarios") {
  TEST_CASE("every builtin validates, is normalized and is pure") {
    for (const auto& id : builtin_ids()) {
      CAPTURE(id);
      auto s = build_builtin(id);
      CHECK(s.id == id);
      CHECK(check_scenario(s).empty());
      CHECK(validate(s.graph, s.dimension()).empty());
      CHECK(std::abs(sigma(s.initial) - 1.0) <= 1e-12);
      CHECK(s == build_builtin(id));
      CHECK_FALSE(builtin_description(id).empty());
      CHECK(s.metadata.contains("dt"));
      CHECK(s.metadata.contains("t_max"));
    }
  }

  TEST_CASE("registry rejects unknown ids and parameters") {
    CHECK_THROWS_AS(build_builtin("nope"), Error);
    CHECK_THROWS_AS(build_builtin("capture", {{"omega", 1.0}}), Error);
    CHECK(build_builtin("capture", {{"g", 0.5}}) == build_capture(0.5));
    CHECK_THROWS_AS(build_serial_counter(11), Error);
    CHECK_THROWS_AS(build_rabi_emission(1.0, 0.2, 49), Error);
    CHECK_THROWS_AS(build_neutron(-1.0, 99), Error);
    CHECK_THROWS_AS(build_localization(7), Error);
    CHECK_THROWS_AS(build_sphere_collision(3), Error);
    CHECK_THROWS_AS(const_hazard_process(0.0), Error);
  }

  TEST_CASE("realized cast matches the golden file") {
    std::ifstream in(QCOLLAPSE_SOURCE_DIR "/tests/golden/realized_cast.json");
    REQUIRE(in);
    auto golden = nlohmann::json::parse(in);
    for (const auto& id : builtin_ids()) {
      CAPTURE(id);
      auto s = build_builtin(id);
      std::set<std::string> cast;
      std::vector<ComponentGraph> todo{s.graph};
      while (!todo.empty()) {
        auto g = std::move(todo.back());
        todo.pop_back();
        cast.insert(g.component(*g.realized()).label);
        for (int c : launch_set(g)) todo.push_back(apply_collapse(g, c));
      }
      REQUIRE(golden.contains(id));
      CHECK(cast == golden[id].get<std::set<std::string>>());
    }
  }

  TEST_CASE("capture") {
    auto s = build_capture(1.0);
    CHECK(launch_set(s.graph) == std::vector<int>{by_label(s.graph, "d_1")});

    auto off = build_capture(0.0);
    EngineConfig cfg = default_config(off);
    auto st = run_ensemble(off, cfg, 20);
    CHECK(st.termination_counts[Termination::Horizon] == 20);

    // Miss case: a horizon far below 1/g leaves pd_0 realized in most trials.
    cfg = default_config(s);
    cfg.t_max = 0.2;
    st = run_ensemble(s, cfg, 2000);
    CHECK(st.final_label_counts["pd_0"] > 1800);
  }

  TEST_CASE("serial counter") {
    auto s = build_serial_counter(3);
    auto g1 = apply_collapse(s.graph, by_label(s.graph, "C1"));
    CHECK(g1.component(by_label(s.graph, "C0")).status == Status::Dead);
    CHECK(g1.component(by_label(s.graph, "C1")).status == Status::Realized);
    CHECK(g1.component(by_label(s.graph, "C2")).status == Status::Ready);
    CHECK(g1.component(by_label(s.graph, "C3")).status == Status::Ready);
    auto g = s.graph;
    while (!launch_set(g).empty()) {
      CHECK(launch_set(g).size() == 1);
      g = apply_collapse(g, launch_set(g).front());
    }
    auto two = build_serial_counter(2);
    std::vector<TrajectoryRecord> recs;
    run_ensemble(two, default_config(two), 100, &recs);
    for (const auto& r : recs) CHECK(r.events.size() == 2);
  }

  TEST_CASE("parallel never fires Cf first") {
    auto s = build_parallel();
    auto st = run_ensemble(s, default_config(s), 500);
    CHECK(st.final_label_counts["Cf"] == 500);
    for (int c : st.first_choices) CHECK(c != by_label(s.graph, "Cf"));
  }

  TEST_CASE("multi_sequence has ten nodes and an asymmetric split follows g squared") {
    auto s = build_multi_sequence();
    CHECK(s.graph.components.size() == 10);
    auto skewed = build_multi_sequence({1.0, 1.0, std::sqrt(2.0)});
    EngineConfig cfg = default_config(skewed);
    cfg.max_collapses = 1;
    const int n = 20000;
    auto st = run_ensemble(skewed, cfg, n);
    int third = 0;
    for (int c : st.first_choices) third += c == by_label(skewed.graph, "CB3") ? 1 : 0;
    CHECK(std::abs(third - n * 0.5) <= 3.0 * binomial_sigma(n, 0.5));
  }

  TEST_CASE("observer signal reaches B1 only after the ladder transfer time") {
    auto s = build_observer();
    const double transfer = s.meta("transfer_time", 0.0);
    REQUIRE(transfer > 0.0);
    auto c = collapse(s.initial, s.graph, 1, CollapseMode::FreshSlice);
    Propagator p(s.hamiltonian.filtered([](Index i) { return i >= 1; }));
    const auto b1 = indices_where(s, "B_1");
    const auto b0 = indices_where(s, "B_0");
    const int n = 200;
    for (int k = 0; k <= n; ++k) {
      const double t = transfer * k / n;
      Amplitudes psi = p.advance(c.state.amplitudes, t);
      const double f1 = sm_value(psi, b1) / psi.squaredNorm();
      const double f0 = sm_value(psi, b0) / psi.squaredNorm();
      if (t < 0.9 * transfer) CHECK(f1 < 0.99);
      CHECK_FALSE((f0 > 0.5 && f1 > 0.5));
    }
    Amplitudes done = p.advance(c.state.amplitudes, transfer);
    CHECK(sm_value(done, b1) >= 0.99);
    auto st = run_ensemble(s, default_config(s), 100);
    CHECK(st.mean_events == 1.0);
  }

  TEST_CASE("rabi emission") {
    auto ground = build_rabi_emission();
    CHECK(hazard_sample(ground.initial, ground.graph).total() == 0.0);
    auto excited = build_rabi_emission(1.0, 0.2, 60, true);
    // The photon band starts empty, so J(0) = 0 exactly; one step later it is positive.
    Simulator sim(excited, default_config(excited));
    auto trace = sim.hazard_trace();
    CHECK(trace.hazard_values[0][0] == 0.0);
    CHECK(trace.hazard_values[0][1] > 0.0);
    auto ground_trace = Simulator(ground, default_config(ground)).hazard_trace();
    CHECK(trace.hazard_values[0][1] > ground_trace.hazard_values[0][1]);

    std::vector<TrajectoryRecord> recs;
    run_ensemble(ground, default_config(ground), 200, &recs);
    for (const auto& r : recs) {
      if (!r.events.empty()) CHECK(r.final_label == "gN-1*a_0(x)gamma");
    }
  }

  TEST_CASE("laser final label carries both sink markers") {
    auto s = build_laser();
    std::vector<TrajectoryRecord> recs;
    run_ensemble(s, default_config(s), 300, &recs);
    int short_branch = 0;
    for (const auto& r : recs) {
      if (r.events.size() == 2 && r.final_label.find("e_xx") != std::string::npos) {
        ++short_branch;
        CHECK(r.final_label.find("a_0") != std::string::npos);
        CHECK(r.final_label.find("e_x") != std::string::npos);
      }
    }
    CHECK(short_branch > 0);
  }

  TEST_CASE("neutron") {
    auto s = build_neutron();
    CHECK(s.meta("golden_rate", 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.meta("t_max", 0.0) < s.meta("t_max_limit", 0.0));
    StateVector psi{Propagator(s.hamiltonian).advance(s.initial.amplitudes, 0.5), 0.5};
    auto c = collapse(psi, s.graph, 1, CollapseMode::FreshSlice);
    for (Index i = 1; i < s.dimension(); ++i) CHECK(std::abs(c.state.amplitudes(i)) > 0.0);

    auto off = build_neutron(0.0);
    auto st = run_ensemble(off, default_config(off), 20);
    CHECK(st.termination_counts[Termination::Horizon] == 20);
  }

  TEST_CASE("localization shrinks the participation ratio from sites to one") {
    auto s = build_localization(16);
    CHECK(participation_ratio(s, s.initial) == doctest::Approx(16.0).epsilon(1e-12));
    std::vector<TrajectoryRecord> recs;
    auto st = run_ensemble(s, default_config(s), 50, &recs);
    CHECK(st.final_label_counts.size() > 1);
    auto psi = evolve(s.initial, s.hamiltonian, 0.5);
    auto c = collapse(psi, s.graph, 3, CollapseMode::FreshSlice);
    CHECK(participation_ratio(s, c.state) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("compton null has nothing to launch") {
    auto s = build_compton_null();
    CHECK(s.graph.edges.empty());
    CHECK(launch_set(s.graph).empty());
    CHECK(s.hamiltonian.entries().size() > s.basis.size());
  }

  TEST_CASE("sphere collision") {
    auto s = build_sphere_collision();
    auto psi = evolve(s.initial, s.hamiltonian, 0.5);
    auto c = collapse(psi, s.graph, 2, CollapseMode::FreshSlice);
    int support = 0;
    for (Index i = 0; i < s.dimension(); ++i) support += std::abs(c.state.amplitudes(i)) > 0.0 ? 1 : 0;
    CHECK(support == 1);

    auto off = build_sphere_collision(8, 0.5, false);
    CHECK(launch_set(off.graph).empty());
    auto st = run_ensemble(off, default_config(off), 20);
    CHECK(st.mean_events == 0.0);

    // Early-time hazard grows linearly with the collision rate.
    auto rate = [](double nu) {
      auto sc = build_sphere_collision(8, 0.5, true, nu);
      auto early = evolve(sc.initial, sc.hamiltonian, 1e-3);
      return hazard_sample(early, sc.graph).total();
    };
    CHECK(rate(3.0) / rate(1.0) == doctest::Approx(3.0).epsilon(1e-5));
  }
}
