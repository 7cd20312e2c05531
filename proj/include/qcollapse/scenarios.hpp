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

#include <map>
#include <string>
#include <vector>

#include "qcollapse/scenario.hpp"

namespace qcollapse {

// Builders for the worked models. All are pure: equal parameters give equal
// specs. Single-label components oscillate against their source; channels
// meant to be irreversible are flat quasi-continua of `n_modes` levels with
// spacing `spacing`, coupled uniformly so that the golden-rule rate is
// 2 pi g^2 / spacing.

/// Particle p meets detector d_0; the ready capture state d_1.
ScenarioSpec build_capture(double g_coupling = 1.0);

/// Counter chain C0 -> C1 -> ... -> Cn, nearest-neighbour couplings g.
ScenarioSpec build_serial_counter(int n = 3, double g = 1.0);

/// Diamond C0 -> {Cr, Cl} -> Cf without the direct C0 -> Cf transition.
ScenarioSpec build_parallel(double g_r = 1.0, double g_l = 1.0, double g_f = 1.0);

/// Two-layer tree CB0 -> {CB1, CB2, CB3} -> {CBka, CBkb}.
ScenarioSpec build_multi_sequence(std::vector<double> first_layer = {1.0, 1.0, 1.0}, double second_layer = 1.0);

/// Capture witnessed by an observer; the ready component carries the signal
/// ladder d_w1 B_0 -> d_i1 B_0 -> d_f1 B_1 with hopping `ladder`.
ScenarioSpec build_observer(double g = 1.0, double ladder = 2.0);

/// Rabi-driven two-level atom with a spontaneous-emission quasi-continuum.
ScenarioSpec build_rabi_emission(double omega = 1.0, double gamma = 0.2, int n_modes = 60, bool start_excited = false,
                                 double spacing = 0.1);

/// Four-level laser cycle: pump a3 -> a2 (x) e_x, then Rabi a2 <=> a1 with a
/// metastable photon branch (rate gamma_meta) and a short-lived e_xx branch
/// (rate gamma_short).
ScenarioSpec build_laser(double omega = 2.0, double gamma_meta = 0.01, double gamma_short = 0.1, double pump = 1.0,
                         int n_modes = 60, double spacing = 8.0 / 60.0);

/// Neutron n feeding a flat e p nubar quasi-continuum. A negative g selects
/// the coupling giving golden-rule rate 1.
ScenarioSpec build_neutron(double g = -1.0, int n_modes = 200, double spacing = 0.05);

/// Atom excited over `sites` positions, each emitting into its own ready
/// component a_0n (x) gamma_n with coupling gamma.
ScenarioSpec build_localization(int sites = 16, double gamma = 0.5);

/// Photon-electron scattering: one realized component, internal couplings
/// only, no jump edges.
ScenarioSpec build_compton_null();

/// Extended sphere s hit by molecule m at `impact_sites` positions. With
/// `rotational_jump` off the collision edges are periodic and nothing can
/// collapse. `collision_rate` scales the squared coupling.
ScenarioSpec build_sphere_collision(int impact_sites = 8, double g = 0.5, bool rotational_jump = true,
                                    double collision_rate = 1.0);

/// Synthetic process: fixed hazards `rates[k]` into launch component k+1.
/// No Schrodinger evolution takes place.
ScenarioSpec const_hazard_process(std::vector<double> rates);
inline ScenarioSpec const_hazard_process(double lambda) { return const_hazard_process(std::vector<double>{lambda}); }

std::vector<std::string> builtin_ids();
std::string builtin_description(const std::string& id);

/// Builds a builtin by id; `params` overrides named builder arguments
/// (unknown names throw InvalidArgument).
ScenarioSpec build_builtin(const std::string& id, const std::map<std::string, double>& params = {});

/// Inverse participation ratio over positions, for labels tagged "@<site>".
double participation_ratio(const ScenarioSpec& s, const StateVector& state);

}  // namespace qcollapse
