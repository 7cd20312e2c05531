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

#include <cstdlib>

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

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("config invariants") {
    EngineConfig cfg;
    CHECK_NOTHROW(cfg.check());
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.check(), Error);
    cfg = {};
    cfg.t_max = -1.0;
    CHECK_THROWS_AS(cfg.check(), Error);
    cfg = {};
    cfg.hazard_cap = 0.6;
    CHECK_THROWS_AS(cfg.check(), Error);
    cfg.hazard_cap = 0.5;
    CHECK_NOTHROW(cfg.check());
  }

  TEST_CASE("zero hazards never fire and evolve unitarily") {
    auto s = build_compton_null();
    Dynamics dyn(s);
    EngineConfig cfg = default_config(s);
    CounterRng rng(5);
    StateVector psi = s.initial;
    for (int k = 0; k < 2000; ++k) {
      auto r = step(psi, s.graph, dyn, cfg, rng);
      REQUIRE_FALSE(r.event);
      psi = r.state;
    }
    CHECK(rng.counter() == 0);
    CHECK(std::abs(sigma(psi) - 1.0) <= 1e-8);
  }

  TEST_CASE("constant hazard fires with probability 1 - exp(-lambda dt) per step") {
    auto s = const_hazard_process(2.0);
    Dynamics dyn(s);
    EngineConfig cfg;
    cfg.dt = 0.01;
    CounterRng rng(12345);
    const int n = 1000000;
    int fired = 0;
    for (int k = 0; k < n; ++k) fired += step(s.initial, s.graph, dyn, cfg, rng).event ? 1 : 0;
    const double p = -std::expm1(-0.02);
    CHECK(std::abs(fired - n * p) <= 3.0 * binomial_sigma(n, p));
  }

  TEST_CASE("choice is proportional to the integrated hazard") {
    auto s = const_hazard_process(std::vector<double>{1.0, 2.0});
    Dynamics dyn(s);
    EngineConfig cfg;
    cfg.dt = 0.05;
    CounterRng rng(777);
    int first = 0, total = 0;
    const int a = by_label(s.graph, "fired_1");
    while (total < 100000) {
      auto r = step(s.initial, s.graph, dyn, cfg, rng);
      if (!r.event) continue;
      ++total;
      first += r.event->chosen == a ? 1 : 0;
      CHECK(r.event->t_sc > s.initial.time);
      CHECK(r.event->t_sc <= s.initial.time + cfg.dt);
    }
    CHECK(std::abs(first - total / 3.0) <= 3.0 * binomial_sigma(total, 1.0 / 3.0));
  }

  TEST_CASE("constant hazard too large for dt raises StepTooLarge") {
    auto s = const_hazard_process(1000.0);
    EngineConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 1.0;
    try {
      run_trajectory(s, cfg);
      FAIL("expected StepTooLarge");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::StepTooLarge);
    }
  }

  TEST_CASE("capture collapse leaves only d_1 at unit norm") {
    auto s = build_capture(1.0);
    StateVector psi = evolve(s.initial, s.hamiltonian, 0.3);
    const int d1 = by_label(s.graph, "d_1");
    auto fresh = collapse(psi, s.graph, d1, CollapseMode::FreshSlice);
    CHECK(fresh.state.amplitudes(0) == Complex{});
    CHECK(sigma(fresh.state) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fresh.graph.realized() == d1);
    CHECK(fresh.graph.component(0).status == Status::Dead);
    // Fresh slice: image of the coupling applied to the source amplitude.
    const Complex image = 1.0 * psi.amplitudes(0);
    CHECK(std::abs(fresh.state.amplitudes(1) - image / std::abs(image)) <= 1e-15);
    CHECK(fresh.relaunch_norm == doctest::Approx(std::abs(image)));

    auto projected = collapse(psi, s.graph, d1, CollapseMode::Projected);
    CHECK(std::abs(projected.state.amplitudes(1) - psi.amplitudes(1) / std::abs(psi.amplitudes(1))) <= 1e-15);
  }

  TEST_CASE("projected collapse renormalizes a 0.3 share to 1") {
    auto s = build_capture(1.0);
    StateVector psi{Amplitudes(2), 0.0};
    psi.amplitudes << std::sqrt(0.7), Complex(0.0, std::sqrt(0.3));
    auto r = collapse(psi, s.graph, 1, CollapseMode::Projected);
    CHECK(r.state.amplitudes(0) == Complex{});
    CHECK(sigma(r.state) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.relaunch_norm == doctest::Approx(std::sqrt(0.3)));
  }

  TEST_CASE("collapse errors") {
    auto s = build_capture(0.0);
    try {
      collapse(s.initial, s.graph, 1, CollapseMode::FreshSlice);
      FAIL("expected ZeroImage");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroImage);
    }
    auto chain = build_serial_counter(3);
    try {
      collapse(chain.initial, chain.graph, by_label(chain.graph, "C2"), CollapseMode::Projected);
      FAIL("expected NotALaunchComponent");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotALaunchComponent);
    }
  }

  TEST_CASE("serial counter fires C1, C2, C3 in order") {
    auto s = build_serial_counter(3);
    std::vector<TrajectoryRecord> recs;
    auto st = run_ensemble(s, default_config(s), 300, &recs);
    CHECK(st.ordering_violations == 0);
    for (const auto& r : recs) {
      for (std::size_t i = 0; i < r.events.size(); ++i) {
        CHECK(s.graph.component(r.events[i].chosen).label == "C" + std::to_string(i + 1));
        if (i > 0) CHECK(r.events[i].t_sc > r.events[i - 1].t_sc);
      }
    }
  }

  TEST_CASE("compton null ends at the horizon without events") {
    auto s = build_compton_null();
    auto r = run_trajectory(s, default_config(s));
    CHECK(r.events.empty());
    CHECK(r.terminated == Termination::Horizon);
    CHECK(r.max_sigma_drift <= 1e-8);
  }

  TEST_CASE("laser cycle has two events when completed") {
    auto s = build_laser();
    std::vector<TrajectoryRecord> recs;
    run_ensemble(s, default_config(s), 200, &recs);
    int completed = 0;
    for (const auto& r : recs) {
      if (r.terminated != Termination::Absorbed) continue;
      ++completed;
      CHECK(r.events.size() == 2);
    }
    CHECK(completed > 0);
  }

  TEST_CASE("max_collapses stops the run") {
    auto s = build_serial_counter(3);
    EngineConfig cfg = default_config(s);
    cfg.max_collapses = 1;
    cfg.seed = 3;
    auto r = run_trajectory(s, cfg);
    CHECK(r.events.size() <= 1);
    if (r.events.size() == 1) CHECK(r.terminated == Termination::MaxCollapses);
  }

  TEST_CASE("determinism with and without the prefix cache") {
    for (const auto& id : {"parallel", "laser", "localization", "const_hazard"}) {
      auto s = build_builtin(id);
      EngineConfig cfg = default_config(s);
      cfg.seed = 2024;
      Simulator plain(s, cfg);
      Simulator cached(s, cfg);
      cached.prepare_prefix();
      REQUIRE(cached.has_prefix());
      for (std::uint64_t i = 0; i < 20; ++i) {
        const auto seed = trajectory_seed(cfg.seed, i);
        auto a = plain.run(seed);
        CHECK(a == plain.run(seed));
        CHECK(a == cached.run(seed));
      }
    }
  }

  TEST_CASE("segment sigma stays constant and post-collapse sigma is one") {
    for (const auto& id : {"capture", "multi_sequence", "rabi_emission", "neutron", "laser"}) {
      auto s = build_builtin(id);
      std::vector<TrajectoryRecord> recs;
      auto st = run_ensemble(s, default_config(s), 50, &recs);
      CHECK(st.max_sigma_drift <= 1e-8);
      for (const auto& r : recs) {
        for (std::size_t i = 1; i < r.events.size(); ++i) {
          CHECK(r.events[i].sigma_before == doctest::Approx(1.0).epsilon(1e-8));
        }
      }
    }
  }

  TEST_CASE("quasi-continuum horizon limit is enforced") {
    auto s = build_neutron();
    EngineConfig cfg = default_config(s);
    cfg.t_max = s.meta("t_max_limit", 0.0) * 1.01;
    CHECK_THROWS_AS(Simulator(s, cfg), Error);
  }

  TEST_CASE("replay catches illegal events") {
    auto s = build_serial_counter(3);
    TrajectoryRecord bad;
    bad.events = {{1.0, by_label(s.graph, "C2"), 1.0, 0.0, 1.0}};
    CHECK(replay_violations(s.graph, bad) == 1);
    TrajectoryRecord unordered;
    unordered.events = {{2.0, by_label(s.graph, "C1"), 1.0, 0.0, 1.0}, {1.0, by_label(s.graph, "C2"), 1.0, 0.0, 1.0}};
    CHECK(replay_violations(s.graph, unordered) == 1);
  }

  TEST_CASE("QCOLLAPSE_THREADS caps the worker count") {
    const char* old = std::getenv("QCOLLAPSE_THREADS");
    std::string saved = old ? old : "";
    setenv("QCOLLAPSE_THREADS", "1", 1);
    CHECK(worker_count() == 1);
    if (old) {
      setenv("QCOLLAPSE_THREADS", saved.c_str(), 1);
    } else {
      unsetenv("QCOLLAPSE_THREADS");
    }
  }
}
