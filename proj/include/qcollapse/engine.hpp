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

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qcollapse/current.hpp"
#include "qcollapse/rng.hpp"
#include "qcollapse/scenario.hpp"
#include "qcollapse/trace.hpp"

namespace qcollapse {

enum class CollapseMode { FreshSlice, Projected };
enum class Termination { Horizon, MaxCollapses, Absorbed };

const char* to_string(CollapseMode mode);
const char* to_string(Termination t);

struct EngineConfig {
  double dt = 0.01;
  double t_max = 10.0;
  /// Largest allowed hazard * dt for any launch component.
  double hazard_cap = 0.1;
  CollapseMode collapse_mode = CollapseMode::FreshSlice;
  std::uint64_t seed = 0;
  std::optional<int> max_collapses;
  /// Amplitude scale of the relaunched state (1 gives sigma = 1). Hazards
  /// are ratios, so this has no observable effect.
  double relaunch_scale = 1.0;

  /// Throws InvalidArgument unless dt > 0, t_max > 0, hazard_cap in (0, 0.5].
  void check() const;
};

/// Config with dt and t_max taken from the scenario metadata when present.
EngineConfig default_config(const ScenarioSpec& s);

struct TrajectoryEvent {
  double t_sc = 0.0;
  int chosen = 0;
  double sigma_before = 0.0;
  double hazard_at_fire = 0.0;
  /// Norm of the relaunch image before rescaling.
  double relaunch_norm = 0.0;

  bool operator==(const TrajectoryEvent&) const = default;
};

struct TrajectoryRecord {
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<TrajectoryEvent> events;
  std::string final_label;
  Termination terminated = Termination::Horizon;
  /// Largest relative sigma change within any collapse-free segment.
  double max_sigma_drift = 0.0;

  bool operator==(const TrajectoryRecord&) const = default;
};

struct CollapseResult {
  StateVector state;
  ComponentGraph graph;
  double relaunch_norm = 0.0;
};

/// Below this the fresh-slice image counts as degenerate.
inline constexpr double kZeroImageNorm = 1e-14;

/// Collapse: `chosen` becomes realized, every amplitude outside it is set
/// to zero. FreshSlice relaunches from the coupling image of the realized
/// restriction; Projected keeps the chosen restriction. Either way the
/// survivor is rescaled to norm `scale`.
CollapseResult collapse(const StateVector& state, const ComponentGraph& g, int chosen, CollapseMode mode,
                        double scale = 1.0);

/// Per-scenario evolution and hazards. Dead components are decoupled from
/// the Hamiltonian, so their amplitudes stay zero. Propagators are cached
/// per live set; the cache is safe to share between threads.
class Dynamics {
 public:
  explicit Dynamics(const ScenarioSpec& scenario);

  const ScenarioSpec& scenario() const { return *scenario_; }
  bool synthetic() const { return !scenario_->synthetic_hazards.empty(); }

  std::shared_ptr<const Propagator> propagator(const ComponentGraph& g) const;
  HazardSample hazards(const StateVector& state, const ComponentGraph& g) const;

 private:
  std::shared_ptr<const ScenarioSpec> scenario_;
  mutable std::mutex mutex_;
  mutable std::map<std::vector<bool>, std::shared_ptr<const Propagator>> cache_;
};

struct StepResult {
  StateVector state;
  ComponentGraph graph;
  HazardSample hazards;  // at the returned state
  std::optional<TrajectoryEvent> event;
};

/// One engine step of length dt from `state`: evolve, integrate the hazard
/// by the trapezoid rule, draw, and collapse if the trigger fires.
StepResult step(const StateVector& state, const ComponentGraph& g, const Dynamics& dynamics,
                const EngineConfig& cfg, CounterRng& rng);

/// Runs trajectories of one scenario. `prepare_prefix` tabulates the
/// collapse-free opening segment once; every trajectory then reuses it,
/// producing results bit-identical to an uncached run.
class Simulator {
 public:
  Simulator(ScenarioSpec scenario, EngineConfig cfg);

  const ScenarioSpec& scenario() const { return dynamics_.scenario(); }
  const EngineConfig& config() const { return cfg_; }
  const Dynamics& dynamics() const { return dynamics_; }

  void prepare_prefix(std::size_t max_bytes = std::size_t{256} << 20);
  bool has_prefix() const { return prefix_.has_value(); }

  TrajectoryRecord run(std::uint64_t seed) const;

  /// Hazards of the collapse-free run on the engine's time grid.
  HazardTrace hazard_trace() const;

 private:
  struct PrefixStep {
    StateVector state;
    HazardSample hazards;
  };
  struct Prefix {
    std::vector<PrefixStep> steps;
    std::optional<std::string> error;  // StepTooLarge raised entering steps.size()
  };

  PrefixStep advance(const Propagator& prop, const StateVector& state, const ComponentGraph& g, double seg_start,
                     std::size_t k) const;
  void check_cap(const HazardSample& hs, double dt) const;

  EngineConfig cfg_;
  Dynamics dynamics_;
  std::optional<Prefix> prefix_;
};

/// Single trajectory with seed cfg.seed.
TrajectoryRecord run_trajectory(const ScenarioSpec& scenario, const EngineConfig& cfg);

/// Number of events that fail replay: chosen not in the recomputed
/// launch_set, or t_sc not strictly increasing.
int replay_violations(const ComponentGraph& initial, const TrajectoryRecord& record);

struct EnsembleStats {
  int trials = 0;
  /// Per-trajectory first collapse time, NaN when none happened.
  std::vector<double> first_hit_times;
  std::vector<int> first_choices;  // -1 when none
  std::map<std::string, int> path_counts;
  std::map<std::string, int> final_label_counts;
  std::map<Termination, int> termination_counts;
  int ordering_violations = 0;
  double mean_events = 0.0;
  double var_events = 0.0;
  double max_sigma_drift = 0.0;
};

/// Seeds: trajectory i uses trajectory_seed(cfg.seed, i). Worker count is
/// capped by QCOLLAPSE_THREADS.
EnsembleStats run_ensemble(const ScenarioSpec& scenario, const EngineConfig& cfg, int trials,
                           std::vector<TrajectoryRecord>* records = nullptr);

/// Runs records through a worker pool, returning them in index order.
std::vector<TrajectoryRecord> run_records(const Simulator& sim, int trials);

EnsembleStats summarize(const ScenarioSpec& scenario, std::span<const TrajectoryRecord> records);

/// Path key: chosen labels joined by '>'.
std::string path_key(const ScenarioSpec& scenario, const TrajectoryRecord& record);

int worker_count();

}  // namespace qcollapse
