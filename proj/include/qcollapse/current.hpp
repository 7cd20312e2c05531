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

#include <utility>
#include <vector>

#include "qcollapse/graph.hpp"
#include "qcollapse/statevec.hpp"

namespace qcollapse {

/// Total squared norm of the system.
inline double sigma(const StateVector& state) { return state.amplitudes.squaredNorm(); }

/// Square-modulus current carried by one edge:
///   J = 2 Im sum_{(r,c) in edge} conj(psi_r) H_rc psi_c
/// which is d/dt of the target's sm_value when the target is fed only
/// through this edge.
template <typename Derived>
double current_into(const Eigen::MatrixBase<Derived>& amplitudes, const JumpEdge& edge) {
  Complex acc{};
  for (const auto& c : edge.couplings) acc += std::conj(amplitudes(c.row)) * c.value * amplitudes(c.col);
  return 2.0 * acc.imag();
}

inline double current_into(const StateVector& state, const JumpEdge& edge) {
  return current_into(state.amplitudes, edge);
}

/// Trigger rates at one instant. `hazards[k]` belongs to `components[k]`;
/// the components are exactly launch_set(g), ascending.
struct HazardSample {
  double time = 0.0;
  double sigma = 0.0;
  std::vector<std::pair<int, double>> edge_currents;  // (edge position, J)
  std::vector<int> components;
  std::vector<double> hazards;

  double hazard(int component) const;
  double total() const;
};

/// hazard(c) = max(0, sum of J over non-periodic edges realized -> c) / sigma.
HazardSample hazard_sample(const StateVector& state, const ComponentGraph& g);

}  // namespace qcollapse
