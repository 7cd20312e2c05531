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

#include "qcollapse/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "qcollapse/current.hpp"

namespace qcollapse {

std::vector<std::string> check_scenario(const ScenarioSpec& s) {
  std::vector<std::string> problems;
  const Index dim = s.dimension();
  if (dim < 1) return {"empty basis"};
  std::set<std::string> names(s.basis.begin(), s.basis.end());
  if (names.size() != s.basis.size()) problems.push_back("duplicate basis labels");
  for (const auto& v : validate(s.graph, dim)) {
    problems.push_back(std::string(to_string(v.kind)) + " " + v.detail +
                       (v.index >= 0 ? " at index " + std::to_string(v.index) : ""));
  }
  if (!problems.empty()) return problems;
  if (s.hamiltonian.dimension() != dim) problems.push_back("hamiltonian dimension differs from basis");
  if (s.initial.dimension() != dim) {
    problems.push_back("initial state dimension differs from basis");
    return problems;
  }

  std::vector<int> owner(static_cast<std::size_t>(dim), -1);
  for (const auto& c : s.graph.components) {
    for (Index i : c.indices) owner[static_cast<std::size_t>(i)] = c.id;
  }
  const int realized = *s.graph.realized();
  for (Index i = 0; i < dim; ++i) {
    if (owner[static_cast<std::size_t>(i)] != realized && s.initial.amplitudes(i) != Complex{}) {
      problems.push_back("initial amplitude outside the realized component at " + s.basis[static_cast<std::size_t>(i)]);
    }
  }
  if (std::abs(sigma(s.initial) - 1.0) > 1e-12) problems.push_back("initial state is not normalized");

  std::map<std::pair<Index, Index>, Complex> h;
  for (const auto& e : s.hamiltonian.entries()) h[{e.row, e.col}] = e.value;
  std::set<std::pair<Index, Index>> covered;
  for (const auto& e : s.graph.edges) {
    for (const auto& c : e.couplings) {
      auto it = h.find({c.row, c.col});
      Complex hv = it == h.end() ? Complex{} : it->second;
      if (std::abs(hv - c.value) > kHermitianTolerance) {
        problems.push_back("edge coupling (" + std::to_string(c.row) + ", " + std::to_string(c.col) +
                           ") disagrees with the hamiltonian");
      }
      covered.insert({c.row, c.col});
      covered.insert({c.col, c.row});
    }
  }
  for (const auto& [key, value] : h) {
    if (owner[static_cast<std::size_t>(key.first)] != owner[static_cast<std::size_t>(key.second)] &&
        !covered.contains(key)) {
      problems.push_back("hamiltonian couples " + s.basis[static_cast<std::size_t>(key.first)] + " and " +
                         s.basis[static_cast<std::size_t>(key.second)] + " without a jump edge");
    }
  }
  for (const auto& [id, rate] : s.synthetic_hazards) {
    if (id < 0 || id >= static_cast<int>(s.graph.components.size()) || !(rate >= 0.0)) {
      problems.push_back("bad synthetic hazard for component " + std::to_string(id));
    }
  }
  return problems;
}

namespace {

class Builder {
 public:
  explicit Builder(std::string id) { spec_.id = std::move(id); }

  Index label(std::string name) {
    spec_.basis.push_back(std::move(name));
    return static_cast<Index>(spec_.basis.size()) - 1;
  }

  int component(std::string name, std::vector<Index> indices, Status status) {
    int id = static_cast<int>(spec_.graph.components.size());
    spec_.graph.components.push_back({id, std::move(name), std::move(indices), status});
    return id;
  }

  void energy(Index i, double e) {
    if (e != 0.0) entries_.push_back({i, i, e});
  }

  void internal(Index a, Index b, Complex v) {
    entries_.push_back({a, b, v});
    entries_.push_back({b, a, std::conj(v)});
  }

  /// Edge from -> to; each coupling is (target index, source index, value).
  void edge(int from, int to, bool periodic, std::vector<Coupling> couplings) {
    for (const auto& c : couplings) internal(c.row, c.col, c.value);
    spec_.graph.edges.push_back({from, to, periodic, std::move(couplings)});
  }

  void meta(const std::string& key, double value) { spec_.metadata[key] = value; }

  ScenarioSpec finish(const std::vector<std::pair<Index, Complex>>& initial) {
    const auto dim = static_cast<Index>(spec_.basis.size());
    spec_.hamiltonian = Operator(dim, entries_);
    spec_.initial = StateVector{Amplitudes::Zero(dim), 0.0};
    for (const auto& [i, v] : initial) spec_.initial.amplitudes(i) = v;
    return std::move(spec_);
  }

  ScenarioSpec& scenario() { return spec_; }

 private:
  ScenarioSpec spec_;
  std::vector<OperatorEntry> entries_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

double band_energy(int k, int n_modes, double spacing) { return (k - 0.5 * (n_modes - 1)) * spacing; }

double band_coupling(double rate, double spacing) { return std::sqrt(rate * spacing / (2.0 * std::numbers::pi)); }

void band_meta(Builder& b, int n_modes, double spacing) {
  b.meta("n_modes", n_modes);
  b.meta("spacing", spacing);
  b.meta("t_max_limit", std::numbers::pi / spacing);  // half the recurrence time 2 pi / spacing
}

}  // namespace

ScenarioSpec build_capture(double g_coupling) {
  require(g_coupling >= 0.0, "capture coupling must be >= 0");
  Builder b("capture");
  Index pd0 = b.label("p*d_0");
  Index d1 = b.label("d_1");
  int c0 = b.component("pd_0", {pd0}, Status::Realized);
  int c1 = b.component("d_1", {d1}, Status::Ready);
  b.edge(c0, c1, false, {{d1, pd0, g_coupling}});
  b.meta("g_coupling", g_coupling);
  b.meta("dt", 0.01);
  b.meta("t_max", 60.0);
  return b.finish({{pd0, 1.0}});
}

ScenarioSpec build_serial_counter(int n, double g) {
  require(n >= 2 && n <= 10, "serial counter needs 2 <= n <= 10");
  require(g >= 0.0, "coupling must be >= 0");
  Builder b("serial_counter");
  std::vector<Index> idx;
  for (int k = 0; k <= n; ++k) idx.push_back(b.label("C_" + std::to_string(k)));
  for (int k = 0; k <= n; ++k) {
    b.component("C" + std::to_string(k), {idx[static_cast<std::size_t>(k)]}, k == 0 ? Status::Realized : Status::Ready);
  }
  for (int k = 0; k < n; ++k) {
    b.edge(k, k + 1, false, {{idx[static_cast<std::size_t>(k + 1)], idx[static_cast<std::size_t>(k)], g}});
  }
  b.meta("n", n);
  b.meta("g", g);
  b.meta("dt", 0.01);
  b.meta("t_max", 100.0);
  return b.finish({{idx[0], 1.0}});
}

ScenarioSpec build_parallel(double g_r, double g_l, double g_f) {
  require(g_r > 0.0 && g_l > 0.0 && g_f > 0.0, "parallel couplings must be > 0");
  Builder b("parallel");
  Index i0 = b.label("C_0"), ir = b.label("C_r"), il = b.label("C_l"), i_f = b.label("C_f");
  int c0 = b.component("C0", {i0}, Status::Realized);
  int cr = b.component("Cr", {ir}, Status::Ready);
  int cl = b.component("Cl", {il}, Status::Ready);
  int cf = b.component("Cf", {i_f}, Status::Ready);
  b.edge(c0, cr, false, {{ir, i0, g_r}});
  b.edge(c0, cl, false, {{il, i0, g_l}});
  b.edge(cr, cf, false, {{i_f, ir, g_f}});
  b.edge(cl, cf, false, {{i_f, il, g_f}});
  b.meta("g_r", g_r);
  b.meta("g_l", g_l);
  b.meta("g_f", g_f);
  b.meta("dt", 0.01);
  b.meta("t_max", 80.0);
  return b.finish({{i0, 1.0}});
}

ScenarioSpec build_multi_sequence(std::vector<double> first_layer, double second_layer) {
  require(first_layer.size() == 3, "multi_sequence needs three first-layer couplings");
  for (double g : first_layer) require(g > 0.0, "couplings must be > 0");
  require(second_layer > 0.0, "couplings must be > 0");
  Builder b("multi_sequence");
  Index root = b.label("CB_0");
  const char* names[3] = {"1", "2", "3"};
  std::vector<Index> mid, leaf;
  for (auto* n : names) mid.push_back(b.label(std::string("CB_") + n));
  for (auto* n : names) {
    leaf.push_back(b.label(std::string("CB_") + n + "a"));
    leaf.push_back(b.label(std::string("CB_") + n + "b"));
  }
  int c_root = b.component("CB0", {root}, Status::Realized);
  std::vector<int> c_mid, c_leaf;
  for (int k = 0; k < 3; ++k) c_mid.push_back(b.component(std::string("CB") + names[k], {mid[k]}, Status::Ready));
  for (int k = 0; k < 3; ++k) {
    c_leaf.push_back(b.component(std::string("CB") + names[k] + "a", {leaf[2 * k]}, Status::Ready));
    c_leaf.push_back(b.component(std::string("CB") + names[k] + "b", {leaf[2 * k + 1]}, Status::Ready));
  }
  for (int k = 0; k < 3; ++k) b.edge(c_root, c_mid[k], false, {{mid[k], root, first_layer[k]}});
  for (int k = 0; k < 3; ++k) {
    b.edge(c_mid[k], c_leaf[2 * k], false, {{leaf[2 * k], mid[k], second_layer}});
    b.edge(c_mid[k], c_leaf[2 * k + 1], false, {{leaf[2 * k + 1], mid[k], second_layer}});
  }
  for (int k = 0; k < 3; ++k) b.meta(std::string("g") + names[k], first_layer[k]);
  b.meta("g_second", second_layer);
  b.meta("dt", 0.01);
  b.meta("t_max", 80.0);
  return b.finish({{root, 1.0}});
}

ScenarioSpec build_observer(double g, double ladder) {
  require(g > 0.0 && ladder > 0.0, "observer couplings must be > 0");
  Builder b("observer");
  Index start = b.label("p*d_0*B_0");
  Index window = b.label("d_w1*B_0");
  Index half = b.label("d_i1*B_0");
  Index brain = b.label("d_f1*B_1");
  int c0 = b.component("pd_0B_0", {start}, Status::Realized);
  int c1 = b.component("d_w1B_0->d_f1B_1", {window, half, brain}, Status::Ready);
  b.internal(half, window, ladder);
  b.internal(brain, half, ladder);
  b.edge(c0, c1, false, {{window, start, g}});
  b.meta("g", g);
  b.meta("ladder", ladder);
  // Uniform 3-site chain: site 3 amplitude is (cos(sqrt2 J t) - 1) / 2.
  b.meta("transfer_time", std::numbers::pi / (std::numbers::sqrt2 * ladder));
  b.meta("dt", 0.01);
  b.meta("t_max", 60.0);
  return b.finish({{start, 1.0}});
}

ScenarioSpec build_rabi_emission(double omega, double gamma, int n_modes, bool start_excited, double spacing) {
  require(n_modes >= 50, "rabi_emission needs n_modes >= 50");
  require(omega >= 0.0 && gamma >= 0.0 && spacing > 0.0, "bad rabi_emission parameters");
  Builder b("rabi_emission");
  // Ground start emits first from the lower pair, excited start from the upper.
  Index first = b.label(start_excited ? "gN*a_1" : "gN*a_0");
  Index second = b.label(start_excited ? "gN+1*a_0" : "gN-1*a_1");
  const std::string photon_prefix = start_excited ? "gN*a_0*gamma_" : "gN-1*a_0*gamma_";
  std::vector<Index> modes;
  for (int k = 0; k < n_modes; ++k) modes.push_back(b.label(photon_prefix + std::to_string(k)));
  const Index excited = start_excited ? first : second;

  int atom = b.component(start_excited ? "gN*a_1<=>gN+1*a_0" : "gN*a_0<=>gN-1*a_1", {first, second},
                         Status::Realized);
  int emitted = b.component(start_excited ? "gN*a_0(x)gamma" : "gN-1*a_0(x)gamma", modes, Status::Ready);
  b.internal(second, first, 0.5 * omega);
  const double gk = band_coupling(gamma, spacing);
  std::vector<Coupling> couplings;
  for (int k = 0; k < n_modes; ++k) {
    b.energy(modes[static_cast<std::size_t>(k)], band_energy(k, n_modes, spacing));
    couplings.push_back({modes[static_cast<std::size_t>(k)], excited, gk});
  }
  b.edge(atom, emitted, false, std::move(couplings));
  b.meta("omega", omega);
  b.meta("gamma", gamma);
  b.meta("start_excited", start_excited ? 1.0 : 0.0);
  b.meta("band_coupling", gk);
  band_meta(b, n_modes, spacing);
  b.meta("dt", 0.02);
  b.meta("t_max", std::min(30.0, std::numbers::pi / spacing));
  return b.finish({{first, 1.0}});
}

ScenarioSpec build_laser(double omega, double gamma_meta, double gamma_short, double pump, int n_modes,
                         double spacing) {
  require(n_modes >= 50, "laser needs n_modes >= 50");
  require(omega >= 0.0 && gamma_meta > 0.0 && gamma_short > 0.0 && pump > 0.0 && spacing > 0.0,
          "bad laser parameters");
  Builder b("laser");
  Index a3 = b.label("gN*a_3");
  Index a2 = b.label("gN*a_2*e_x");
  Index a1 = b.label("gN+1*a_1*e_x");
  std::vector<Index> meta_band, short_band;
  for (int k = 0; k < n_modes; ++k) meta_band.push_back(b.label("gN*a_1*e_x*gamma_" + std::to_string(k)));
  for (int k = 0; k < n_modes; ++k) short_band.push_back(b.label("gN+1*a_0*e_x*e_xx_" + std::to_string(k)));

  int pumped = b.component("gN*a_3", {a3}, Status::Realized);
  int rabi = b.component("gN*a_2(x)e_x<=>gN+1*a_1(x)e_x", {a2, a1}, Status::Ready);
  int metastable = b.component("gN*a_1(x)e_x(x)gamma", meta_band, Status::Ready);
  int short_lived = b.component("gN+1*a_0(x)e_x(x)e_xx", short_band, Status::Ready);

  b.internal(a1, a2, 0.5 * omega);
  b.edge(pumped, rabi, false, {{a2, a3, pump}});
  const double gm = band_coupling(gamma_meta, spacing);
  const double gs = band_coupling(gamma_short, spacing);
  std::vector<Coupling> to_meta, to_short;
  for (int k = 0; k < n_modes; ++k) {
    const double e = band_energy(k, n_modes, spacing);
    b.energy(meta_band[static_cast<std::size_t>(k)], e);
    b.energy(short_band[static_cast<std::size_t>(k)], e);
    to_meta.push_back({meta_band[static_cast<std::size_t>(k)], a2, gm});
    to_short.push_back({short_band[static_cast<std::size_t>(k)], a1, gs});
  }
  b.edge(rabi, metastable, false, std::move(to_meta));
  b.edge(rabi, short_lived, false, std::move(to_short));
  b.meta("omega", omega);
  b.meta("gamma_meta", gamma_meta);
  b.meta("gamma_short", gamma_short);
  b.meta("pump", pump);
  band_meta(b, n_modes, spacing);
  b.meta("dt", 0.02);
  b.meta("t_max", std::min(22.0, std::numbers::pi / spacing));
  return b.finish({{a3, 1.0}});
}

ScenarioSpec build_neutron(double g, int n_modes, double spacing) {
  require(n_modes >= 100, "neutron needs n_modes >= 100");
  require(spacing > 0.0, "spacing must be > 0");
  if (g < 0.0) g = band_coupling(1.0, spacing);
  Builder b("neutron");
  Index n = b.label("n");
  std::vector<Index> modes;
  for (int k = 0; k < n_modes; ++k) modes.push_back(b.label("e*p*nubar_" + std::to_string(k)));
  int neutron = b.component("n", {n}, Status::Realized);
  int decay = b.component("e*p*nubar", modes, Status::Ready);
  std::vector<Coupling> couplings;
  for (int k = 0; k < n_modes; ++k) {
    b.energy(modes[static_cast<std::size_t>(k)], band_energy(k, n_modes, spacing));
    couplings.push_back({modes[static_cast<std::size_t>(k)], n, g});
  }
  b.edge(neutron, decay, false, std::move(couplings));
  b.meta("g", g);
  b.meta("golden_rate", 2.0 * std::numbers::pi * g * g / spacing);
  band_meta(b, n_modes, spacing);
  b.meta("dt", 0.02);
  b.meta("t_max", std::min(10.0, std::numbers::pi / spacing));
  return b.finish({{n, 1.0}});
}

ScenarioSpec build_localization(int sites, double gamma) {
  require(sites >= 8, "localization needs sites >= 8");
  require(gamma > 0.0, "gamma must be > 0");
  Builder b("localization");
  std::vector<Index> excited, emitted;
  for (int k = 0; k < sites; ++k) excited.push_back(b.label("gN-1*a_1@" + std::to_string(k)));
  for (int k = 0; k < sites; ++k) {
    emitted.push_back(b.label("gN-1*a_0@" + std::to_string(k) + "*gamma_" + std::to_string(k)));
  }
  int atom = b.component("gN-1*a_1@extended", excited, Status::Realized);
  for (int k = 0; k < sites; ++k) {
    auto kk = static_cast<std::size_t>(k);
    int c = b.component("gN-1*a_0@" + std::to_string(k) + "(x)gamma_" + std::to_string(k), {emitted[kk]},
                        Status::Ready);
    b.edge(atom, c, false, {{emitted[kk], excited[kk], gamma}});
  }
  b.meta("sites", sites);
  b.meta("gamma", gamma);
  b.meta("dt", 0.01);
  b.meta("t_max", 60.0);
  std::vector<std::pair<Index, Complex>> init;
  for (Index i : excited) init.emplace_back(i, 1.0 / std::sqrt(static_cast<double>(sites)));
  return b.finish(init);
}

ScenarioSpec build_compton_null() {
  Builder b("compton_null");
  constexpr int kModes = 6;
  std::vector<Index> idx;
  for (int k = 0; k < kModes; ++k) idx.push_back(b.label("gamma_" + std::to_string(k) + "*e_" + std::to_string(k)));
  b.component("gamma*e", idx, Status::Realized);
  for (int k = 0; k < kModes; ++k) {
    auto kk = static_cast<std::size_t>(k);
    b.energy(idx[kk], 0.1 * k);
    b.internal(idx[(kk + 1) % kModes], idx[kk], std::polar(0.3, std::numbers::pi * k / kModes));
  }
  b.internal(idx[3], idx[0], Complex(0.0, 0.2));
  b.meta("dt", 0.01);
  b.meta("t_max", 50.0);
  return b.finish({{idx[0], 1.0}});
}

ScenarioSpec build_sphere_collision(int impact_sites, double g, bool rotational_jump, double collision_rate) {
  require(impact_sites >= 4, "sphere_collision needs impact_sites >= 4");
  require(g > 0.0 && collision_rate > 0.0, "bad sphere_collision parameters");
  Builder b("sphere_collision");
  std::vector<Index> before, after;
  for (int k = 0; k < impact_sites; ++k) before.push_back(b.label("s@" + std::to_string(k) + "*m"));
  for (int k = 0; k < impact_sites; ++k) after.push_back(b.label("s'@" + std::to_string(k) + "*m'"));
  int sm = b.component("sm", before, Status::Realized);
  const double coupling = g * std::sqrt(collision_rate);
  for (int k = 0; k < impact_sites; ++k) {
    auto kk = static_cast<std::size_t>(k);
    int c = b.component("s'm'@" + std::to_string(k), {after[kk]}, Status::Ready);
    b.edge(sm, c, !rotational_jump, {{after[kk], before[kk], coupling}});
  }
  b.meta("sites", impact_sites);
  b.meta("g", g);
  b.meta("rotational_jump", rotational_jump ? 1.0 : 0.0);
  b.meta("collision_rate", collision_rate);
  b.meta("dt", 0.01);
  b.meta("t_max", 60.0);
  std::vector<std::pair<Index, Complex>> init;
  for (Index i : before) init.emplace_back(i, 1.0 / std::sqrt(static_cast<double>(impact_sites)));
  return b.finish(init);
}

ScenarioSpec const_hazard_process(std::vector<double> rates) {
  require(!rates.empty(), "const_hazard needs at least one rate");
  double total = 0.0;
  for (double r : rates) {
    require(r > 0.0, "const_hazard rates must be > 0");
    total += r;
  }
  Builder b("const_hazard");
  Index idle = b.label("idle");
  int c0 = b.component("idle", {idle}, Status::Realized);
  for (std::size_t k = 0; k < rates.size(); ++k) {
    const std::string name = rates.size() == 1 ? "fired" : "fired_" + std::to_string(k + 1);
    int c = b.component(name, {b.label(name)}, Status::Ready);
    b.edge(c0, c, false, {});
    b.scenario().synthetic_hazards.emplace_back(c, rates[k]);
    b.meta("lambda_" + std::to_string(k + 1), rates[k]);
  }
  b.meta("dt", 0.005);
  b.meta("t_max", 40.0 / total);
  return b.finish({{idle, 1.0}});
}

namespace {

struct Entry {
  const char* id;
  const char* description;
};

constexpr Entry kBuiltins[] = {
    {"capture", "particle capture by a detector (params: g)"},
    {"neutron", "free neutron decay into a flat quasi-continuum (params: g, n_modes, spacing)"},
    {"serial_counter", "counter chain C0->C1->...->Cn (params: n, g)"},
    {"parallel", "diamond C0->{Cr,Cl}->Cf (params: g_r, g_l, g_f)"},
    {"observer", "capture with observer signal ladder (params: g, ladder)"},
    {"multi_sequence", "two-layer tree with six sequences (params: g1, g2, g3, g_second)"},
    {"compton_null", "scattering without orthogonal jumps; never collapses"},
    {"rabi_emission", "Rabi-driven atom with spontaneous emission (params: omega, gamma, n_modes, start_excited, spacing)"},
    {"laser", "four-level pump cycle, two hits per photon (params: omega, gamma_meta, gamma_short, pump, n_modes, spacing)"},
    {"localization", "extended atom localized by emission (params: sites, gamma)"},
    {"sphere_collision", "collision-triggered sphere localization (params: sites, g, rotational_jump, collision_rate)"},
    {"const_hazard", "synthetic constant-hazard process (params: lambda)"},
};

class Params {
 public:
  Params(const std::string& id, const std::map<std::string, double>& p) : id_(id), p_(p) {}
  double get(const std::string& key, double fallback) {
    used_.insert(key);
    auto it = p_.find(key);
    return it == p_.end() ? fallback : it->second;
  }
  int get_int(const std::string& key, int fallback) { return static_cast<int>(std::lround(get(key, fallback))); }
  void finish() const {
    for (const auto& [k, v] : p_) {
      if (!used_.contains(k)) throw Error(ErrorCode::InvalidArgument, "unknown parameter '" + k + "' for " + id_);
    }
  }

 private:
  std::string id_;
  const std::map<std::string, double>& p_;
  std::set<std::string> used_;
};

}  // namespace

std::vector<std::string> builtin_ids() {
  std::vector<std::string> out;
  for (const auto& e : kBuiltins) out.emplace_back(e.id);
  return out;
}

std::string builtin_description(const std::string& id) {
  for (const auto& e : kBuiltins) {
    if (id == e.id) return e.description;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown scenario id '" + id + "'");
}

ScenarioSpec build_builtin(const std::string& id, const std::map<std::string, double>& params) {
  Params p(id, params);
  ScenarioSpec out;
  if (id == "capture") {
    out = build_capture(p.get("g", 1.0));
  } else if (id == "neutron") {
    out = build_neutron(p.get("g", -1.0), p.get_int("n_modes", 200), p.get("spacing", 0.05));
  } else if (id == "serial_counter") {
    out = build_serial_counter(p.get_int("n", 3), p.get("g", 1.0));
  } else if (id == "parallel") {
    out = build_parallel(p.get("g_r", 1.0), p.get("g_l", 1.0), p.get("g_f", 1.0));
  } else if (id == "observer") {
    out = build_observer(p.get("g", 1.0), p.get("ladder", 2.0));
  } else if (id == "multi_sequence") {
    out = build_multi_sequence({p.get("g1", 1.0), p.get("g2", 1.0), p.get("g3", 1.0)}, p.get("g_second", 1.0));
  } else if (id == "compton_null") {
    out = build_compton_null();
  } else if (id == "rabi_emission") {
    out = build_rabi_emission(p.get("omega", 1.0), p.get("gamma", 0.2), p.get_int("n_modes", 60),
                              p.get("start_excited", 0.0) != 0.0, p.get("spacing", 0.1));
  } else if (id == "laser") {
    out = build_laser(p.get("omega", 2.0), p.get("gamma_meta", 0.01), p.get("gamma_short", 0.1), p.get("pump", 1.0),
                      p.get_int("n_modes", 60), p.get("spacing", 8.0 / 60.0));
  } else if (id == "localization") {
    out = build_localization(p.get_int("sites", 16), p.get("gamma", 0.5));
  } else if (id == "sphere_collision") {
    out = build_sphere_collision(p.get_int("sites", 8), p.get("g", 0.5), p.get("rotational_jump", 1.0) != 0.0,
                                 p.get("collision_rate", 1.0));
  } else if (id == "const_hazard") {
    out = const_hazard_process(p.get("lambda", 2.0));
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown scenario id '" + id + "'");
  }
  p.finish();
  return out;
}

double participation_ratio(const ScenarioSpec& s, const StateVector& state) {
  std::map<long, double> weight;
  for (std::size_t i = 0; i < s.basis.size(); ++i) {
    auto at = s.basis[i].find('@');
    if (at == std::string::npos) continue;
    long site = std::strtol(s.basis[i].c_str() + at + 1, nullptr, 10);
    weight[site] += std::norm(state.amplitudes(static_cast<Index>(i)));
  }
  double total = 0.0, squares = 0.0;
  for (const auto& [site, w] : weight) {
    total += w;
    squares += w * w;
  }
  if (!(squares > 0.0)) throw Error(ErrorCode::InvalidArgument, "state has no positional weight");
  return total * total / squares;
}

}  // namespace qcollapse
