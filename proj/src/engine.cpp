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

#include "qcollapse/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "qcollapse/stats.hpp"

namespace qcollapse {

const char* to_string(CollapseMode mode) {
  return mode == CollapseMode::FreshSlice ? "fresh_slice" : "projected";
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Horizon: return "horizon";
    case Termination::MaxCollapses: return "max_collapses";
    case Termination::Absorbed: return "absorbed";
  }
  return "unknown";
}

void EngineConfig::check() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw Error(ErrorCode::InvalidArgument, "t_max must be > 0");
  if (!(hazard_cap > 0.0 && hazard_cap <= 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "hazard_cap must lie in (0, 0.5]");
  }
  if (max_collapses && *max_collapses < 0) throw Error(ErrorCode::InvalidArgument, "max_collapses must be >= 0");
  if (!(relaunch_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "relaunch_scale must be > 0");
}

EngineConfig default_config(const ScenarioSpec& s) {
  EngineConfig cfg;
  cfg.dt = s.meta("dt", cfg.dt);
  cfg.t_max = s.meta("t_max", cfg.t_max);
  return cfg;
}

CollapseResult collapse(const StateVector& state, const ComponentGraph& g, int chosen, CollapseMode mode,
                        double scale) {
  CollapseResult out{StateVector{Amplitudes::Zero(state.dimension()), state.time}, apply_collapse(g, chosen), 0.0};
  const int source = *g.realized();
  Amplitudes& image = out.state.amplitudes;
  if (mode == CollapseMode::FreshSlice) {
    for (const auto& e : g.edges) {
      if (e.periodic || e.from != source || e.to != chosen) continue;
      for (const auto& c : e.couplings) image(c.row) += c.value * state.amplitudes(c.col);
    }
  } else {
    for (Index i : g.component(chosen).indices) image(i) = state.amplitudes(i);
  }
  out.relaunch_norm = image.norm();
  if (!(out.relaunch_norm >= kZeroImageNorm)) {
    throw Error(ErrorCode::ZeroImage, "relaunch image of " + g.component(chosen).label + " has norm " +
                                          std::to_string(out.relaunch_norm));
  }
  image *= scale / out.relaunch_norm;
  return out;
}

// --- Dynamics ---------------------------------------------------------------

Dynamics::Dynamics(const ScenarioSpec& scenario) : scenario_(std::make_shared<const ScenarioSpec>(scenario)) {}

std::shared_ptr<const Propagator> Dynamics::propagator(const ComponentGraph& g) const {
  auto mask = synthetic() ? std::vector<bool>{} : g.live_mask();
  std::lock_guard lock(mutex_);
  auto it = cache_.find(mask);
  if (it != cache_.end()) return it->second;
  std::shared_ptr<const Propagator> prop;
  if (synthetic()) {
    prop = std::make_shared<const Propagator>(Operator::zero(scenario_->dimension()));
  } else {
    std::vector<bool> live_index(static_cast<std::size_t>(scenario_->dimension()), false);
    for (const auto& c : g.components) {
      if (c.status == Status::Dead) continue;
      for (Index i : c.indices) live_index[static_cast<std::size_t>(i)] = true;
    }
    prop = std::make_shared<const Propagator>(
        scenario_->hamiltonian.filtered([&](Index i) { return live_index[static_cast<std::size_t>(i)]; }));
  }
  cache_.emplace(std::move(mask), prop);
  return prop;
}

HazardSample Dynamics::hazards(const StateVector& state, const ComponentGraph& g) const {
  if (!synthetic()) return hazard_sample(state, g);
  HazardSample out;
  out.time = state.time;
  out.sigma = sigma(state);
  out.components = launch_set(g);
  for (int c : out.components) {
    double rate = 0.0;
    for (const auto& [id, r] : scenario_->synthetic_hazards) {
      if (id == c) rate = r;
    }
    out.hazards.push_back(rate);
  }
  return out;
}

namespace {

struct Fire {
  int chosen = 0;
  double fraction = 0.0;  // position of t_sc inside the step
};

// Trapezoid-integrated hazard over one step; one uniform decides firing
// (P = 1 - exp(-Lambda)), a second one picks the component proportionally
// to its integrated hazard. Nothing is drawn when Lambda == 0.
std::optional<Fire> draw_fire(const HazardSample& a, const HazardSample& b, double dt, CounterRng& rng) {
  const std::size_t n = a.components.size();
  if (n == 0) return std::nullopt;
  double integrated[64];
  std::vector<double> spill;
  double* w = integrated;
  if (n > 64) {
    spill.resize(n);
    w = spill.data();
  }
  double lambda = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = 0.5 * dt * (a.hazards[k] + b.hazards[k]);
    lambda += w[k];
  }
  if (!(lambda > 0.0)) return std::nullopt;
  const double u = rng.uniform();
  if (!(u < -std::expm1(-lambda))) return std::nullopt;
  Fire fire;
  fire.fraction = std::clamp(-std::log1p(-u) / lambda, 0.0, 1.0);
  const double v = rng.uniform() * lambda;
  double acc = 0.0;
  fire.chosen = a.components[n - 1];
  for (std::size_t k = 0; k < n; ++k) {
    acc += w[k];
    if (v < acc && w[k] > 0.0) {
      fire.chosen = a.components[k];
      break;
    }
  }
  return fire;
}

CollapseResult relaunch(const Dynamics& dyn, const StateVector& pre, const ComponentGraph& g, int chosen,
                        const EngineConfig& cfg) {
  if (!dyn.synthetic()) return collapse(pre, g, chosen, cfg.collapse_mode, cfg.relaunch_scale);
  // Synthetic rates carry no couplings: relaunch on the first basis state.
  CollapseResult out{StateVector{Amplitudes::Zero(pre.dimension()), pre.time}, apply_collapse(g, chosen), 1.0};
  out.state.amplitudes(g.component(chosen).indices.front()) = cfg.relaunch_scale;
  return out;
}

double max_hazard(const HazardSample& hs) {
  return hs.hazards.empty() ? 0.0 : *std::max_element(hs.hazards.begin(), hs.hazards.end());
}

}  // namespace

StepResult step(const StateVector& state, const ComponentGraph& g, const Dynamics& dynamics,
                const EngineConfig& cfg, CounterRng& rng) {
  cfg.check();
  const auto prop = dynamics.propagator(g);
  const HazardSample start = dynamics.hazards(state, g);
  StateVector next = prop->step(state, cfg.dt);
  HazardSample end = dynamics.hazards(next, g);
  for (const HazardSample* hs : {&start, static_cast<const HazardSample*>(&end)}) {
    if (max_hazard(*hs) * cfg.dt > cfg.hazard_cap) {
      throw Error(ErrorCode::StepTooLarge, "hazard*dt exceeds hazard_cap; reduce dt");
    }
  }
  auto fire = draw_fire(start, end, cfg.dt, rng);
  if (!fire) return {std::move(next), g, std::move(end), std::nullopt};

  StateVector pre{prop->advance(state.amplitudes, fire->fraction * cfg.dt), state.time + fire->fraction * cfg.dt};
  const HazardSample at_fire = dynamics.hazards(pre, g);
  auto collapsed = relaunch(dynamics, pre, g, fire->chosen, cfg);
  TrajectoryEvent event{pre.time, fire->chosen, sigma(pre), at_fire.hazard(fire->chosen), collapsed.relaunch_norm};
  HazardSample after = dynamics.hazards(collapsed.state, collapsed.graph);
  return {std::move(collapsed.state), std::move(collapsed.graph), std::move(after), event};
}

// --- Simulator --------------------------------------------------------------

Simulator::Simulator(ScenarioSpec scenario, EngineConfig cfg) : cfg_(cfg), dynamics_(scenario) {
  cfg_.check();
  auto problems = check_scenario(dynamics_.scenario());
  if (!problems.empty()) throw Error(ErrorCode::InvalidArgument, "invalid scenario: " + problems.front());
  const double limit = dynamics_.scenario().meta("t_max_limit", std::numeric_limits<double>::infinity());
  if (cfg_.t_max > limit) {
    throw Error(ErrorCode::InvalidArgument, "t_max " + std::to_string(cfg_.t_max) +
                                                " exceeds the quasi-continuum limit " + std::to_string(limit));
  }
}

void Simulator::check_cap(const HazardSample& hs, double dt) const {
  if (max_hazard(hs) * dt > cfg_.hazard_cap) {
    throw Error(ErrorCode::StepTooLarge, "hazard " + std::to_string(max_hazard(hs)) + " at t=" +
                                             std::to_string(hs.time) + " gives hazard*dt above hazard_cap " +
                                             std::to_string(cfg_.hazard_cap) + "; reduce dt");
  }
}

namespace {

bool before_horizon(double t, double t_max) { return t_max - t > 1e-12 * t_max; }

}  // namespace

Simulator::PrefixStep Simulator::advance(const Propagator& prop, const StateVector& state, const ComponentGraph& g,
                                         double seg_start, std::size_t k) const {
  const double remaining = cfg_.t_max - state.time;
  const bool full = remaining >= cfg_.dt;
  const double dt = full ? cfg_.dt : remaining;
  StateVector next = prop.step(state, dt);
  next.time = full ? seg_start + static_cast<double>(k + 1) * cfg_.dt : cfg_.t_max;
  HazardSample hs = dynamics_.hazards(next, g);
  return {std::move(next), std::move(hs)};
}

void Simulator::prepare_prefix(std::size_t max_bytes) {
  const auto& s = dynamics_.scenario();
  const double steps = std::ceil(cfg_.t_max / cfg_.dt) + 1;
  const double bytes = steps * (static_cast<double>(s.dimension()) * sizeof(Complex) + 256.0);
  if (bytes > static_cast<double>(max_bytes)) return;

  Prefix prefix;
  const auto prop = dynamics_.propagator(s.graph);
  PrefixStep first{s.initial, dynamics_.hazards(s.initial, s.graph)};
  check_cap(first.hazards, cfg_.dt);
  prefix.steps.push_back(std::move(first));
  const double seg_start = s.initial.time;
  while (before_horizon(prefix.steps.back().state.time, cfg_.t_max)) {
    const std::size_t k = prefix.steps.size() - 1;
    PrefixStep next = advance(*prop, prefix.steps.back().state, s.graph, seg_start, k);
    try {
      check_cap(next.hazards, cfg_.dt);
    } catch (const Error& e) {
      prefix.error = e.what();
      break;
    }
    prefix.steps.push_back(std::move(next));
  }
  prefix_ = std::move(prefix);
}

TrajectoryRecord Simulator::run(std::uint64_t seed) const {
  const auto& s = dynamics_.scenario();
  CounterRng rng(seed);
  TrajectoryRecord rec;
  rec.scenario = s.id;
  rec.seed = seed;

  ComponentGraph g = s.graph;
  auto prop = dynamics_.propagator(g);
  bool in_prefix = prefix_.has_value();
  StateVector owned_state = in_prefix ? StateVector{} : s.initial;
  HazardSample owned_hs;
  if (!in_prefix) {
    owned_hs = dynamics_.hazards(owned_state, g);
    check_cap(owned_hs, cfg_.dt);
  }
  std::size_t k = 0;
  double seg_start = s.initial.time;
  double sigma_ref = sigma(s.initial);

  auto current_state = [&]() -> const StateVector& { return in_prefix ? prefix_->steps[k].state : owned_state; };
  auto current_hs = [&]() -> const HazardSample& { return in_prefix ? prefix_->steps[k].hazards : owned_hs; };

  while (true) {
    if (!before_horizon(current_state().time, cfg_.t_max)) {
      rec.terminated = Termination::Horizon;
      break;
    }
    PrefixStep computed;
    const PrefixStep* next = nullptr;
    if (in_prefix) {
      if (k + 1 >= prefix_->steps.size()) {
        throw Error(ErrorCode::StepTooLarge, prefix_->error.value_or("prefix exhausted before horizon"));
      }
      next = &prefix_->steps[k + 1];
    } else {
      computed = advance(*prop, owned_state, g, seg_start, k);
      check_cap(computed.hazards, cfg_.dt);
      next = &computed;
    }
    const double dt = next->state.time - current_state().time;
    auto fire = draw_fire(current_hs(), next->hazards, dt, rng);
    if (!fire) {
      rec.max_sigma_drift = std::max(rec.max_sigma_drift, std::abs(next->hazards.sigma - sigma_ref) / sigma_ref);
      if (in_prefix) {
        ++k;
      } else {
        owned_state = std::move(computed.state);
        owned_hs = std::move(computed.hazards);
        ++k;
      }
      continue;
    }

    const StateVector& from = current_state();
    StateVector pre{prop->advance(from.amplitudes, fire->fraction * dt), from.time + fire->fraction * dt};
    const HazardSample at_fire = dynamics_.hazards(pre, g);
    auto collapsed = relaunch(dynamics_, pre, g, fire->chosen, cfg_);
    rec.events.push_back(
        {pre.time, fire->chosen, sigma(pre), at_fire.hazard(fire->chosen), collapsed.relaunch_norm});

    in_prefix = false;
    owned_state = std::move(collapsed.state);
    g = std::move(collapsed.graph);
    k = 0;
    seg_start = owned_state.time;
    sigma_ref = sigma(owned_state);

    if (cfg_.max_collapses && static_cast<int>(rec.events.size()) >= *cfg_.max_collapses) {
      rec.terminated = Termination::MaxCollapses;
      break;
    }
    if (is_absorbing(g)) {
      rec.terminated = Termination::Absorbed;
      break;
    }
    prop = dynamics_.propagator(g);
    owned_hs = dynamics_.hazards(owned_state, g);
    check_cap(owned_hs, cfg_.dt);
  }
  rec.final_label = g.component(*g.realized()).label;
  return rec;
}

HazardTrace Simulator::hazard_trace() const {
  const auto& s = dynamics_.scenario();
  HazardTrace trace;
  trace.components = launch_set(s.graph);
  trace.hazard_values.resize(trace.components.size());
  auto record = [&](const HazardSample& hs) {
    trace.times.push_back(hs.time);
    for (std::size_t c = 0; c < trace.components.size(); ++c) trace.hazard_values[c].push_back(hs.hazards[c]);
  };
  if (prefix_) {
    if (prefix_->error) throw Error(ErrorCode::StepTooLarge, *prefix_->error);
    for (const auto& p : prefix_->steps) record(p.hazards);
    return trace;
  }
  const auto prop = dynamics_.propagator(s.graph);
  PrefixStep cur{s.initial, dynamics_.hazards(s.initial, s.graph)};
  check_cap(cur.hazards, cfg_.dt);
  record(cur.hazards);
  std::size_t k = 0;
  while (before_horizon(cur.state.time, cfg_.t_max)) {
    cur = advance(*prop, cur.state, s.graph, s.initial.time, k++);
    check_cap(cur.hazards, cfg_.dt);
    record(cur.hazards);
  }
  return trace;
}

TrajectoryRecord run_trajectory(const ScenarioSpec& scenario, const EngineConfig& cfg) {
  return Simulator(scenario, cfg).run(cfg.seed);
}

int replay_violations(const ComponentGraph& initial, const TrajectoryRecord& record) {
  int violations = 0;
  ComponentGraph g = initial;
  double last = -std::numeric_limits<double>::infinity();
  for (const auto& e : record.events) {
    if (!(e.t_sc > last)) ++violations;
    last = e.t_sc;
    auto launch = launch_set(g);
    if (std::find(launch.begin(), launch.end(), e.chosen) == launch.end()) {
      ++violations;
      break;  // the graph can no longer be replayed
    }
    g = apply_collapse(g, e.chosen);
  }
  return violations;
}

std::string path_key(const ScenarioSpec& scenario, const TrajectoryRecord& record) {
  std::string key;
  for (const auto& e : record.events) {
    if (!key.empty()) key += '>';
    key += scenario.graph.component(e.chosen).label;
  }
  return key;
}

int worker_count() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("QCOLLAPSE_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

std::vector<TrajectoryRecord> run_records(const Simulator& sim, int trials) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  std::vector<TrajectoryRecord> records(static_cast<std::size_t>(trials));
  const int workers = std::min(worker_count(), trials);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int i = next++; i < trials; i = next++) {
      try {
        records[static_cast<std::size_t>(i)] =
            sim.run(trajectory_seed(sim.config().seed, static_cast<std::uint64_t>(i)));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = trials;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

EnsembleStats summarize(const ScenarioSpec& scenario, std::span<const TrajectoryRecord> records) {
  EnsembleStats st;
  st.trials = static_cast<int>(records.size());
  std::vector<double> counts;
  for (const auto& r : records) {
    st.first_hit_times.push_back(r.events.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                  : r.events.front().t_sc);
    st.first_choices.push_back(r.events.empty() ? -1 : r.events.front().chosen);
    ++st.path_counts[path_key(scenario, r)];
    ++st.final_label_counts[r.final_label];
    ++st.termination_counts[r.terminated];
    st.ordering_violations += replay_violations(scenario.graph, r);
    st.max_sigma_drift = std::max(st.max_sigma_drift, r.max_sigma_drift);
    counts.push_back(static_cast<double>(r.events.size()));
  }
  st.mean_events = mean(counts);
  st.var_events = variance(counts);
  return st;
}

EnsembleStats run_ensemble(const ScenarioSpec& scenario, const EngineConfig& cfg, int trials,
                           std::vector<TrajectoryRecord>* records) {
  Simulator sim(scenario, cfg);
  sim.prepare_prefix();
  auto recs = run_records(sim, trials);
  auto stats = summarize(scenario, recs);
  if (records) *records = std::move(recs);
  return stats;
}

}  // namespace qcollapse
