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
#include <utility>
#include <vector>

#include "qcollapse/graph.hpp"
#include "qcollapse/statevec.hpp"

namespace qcollapse {

/// Everything needed to simulate one model: basis, Hamiltonian, component
/// graph, and initial state.
///
/// `synthetic_hazards`, when nonempty, replaces the Schrodinger-driven
/// hazards with fixed rates per launch component (sampler calibration).
///
/// Recognised metadata keys: "dt" and "t_max" (recommended engine settings)
/// and "t_max_limit" (longest horizon for which a quasi-continuum stays
/// below half its recurrence time).
struct ScenarioSpec {
  std::string id;
  std::vector<std::string> basis;
  Operator hamiltonian;
  ComponentGraph graph;
  StateVector initial;
  std::map<std::string, double> metadata;
  std::vector<std::pair<int, double>> synthetic_hazards;

  Index dimension() const { return static_cast<Index>(basis.size()); }
  double meta(const std::string& key, double fallback) const {
    auto it = metadata.find(key);
    return it == metadata.end() ? fallback : it->second;
  }

  bool operator==(const ScenarioSpec&) const = default;
};

/// Graph violations plus scenario-level checks (initial support on the
/// realized component, unit norm, Hamiltonian consistency with the edges).
/// Returns human-readable problems; empty means valid.
std::vector<std::string> check_scenario(const ScenarioSpec& s);

}  // namespace qcollapse
