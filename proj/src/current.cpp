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

#include "qcollapse/current.hpp"

#include <algorithm>
#include <numeric>

namespace qcollapse {

double HazardSample::hazard(int component) const {
  auto it = std::find(components.begin(), components.end(), component);
  return it == components.end() ? 0.0 : hazards[static_cast<std::size_t>(it - components.begin())];
}

double HazardSample::total() const { return std::accumulate(hazards.begin(), hazards.end(), 0.0); }

HazardSample hazard_sample(const StateVector& state, const ComponentGraph& g) {
  HazardSample out;
  out.time = state.time;
  out.sigma = sigma(state);
  out.components = launch_set(g);
  out.hazards.assign(out.components.size(), 0.0);
  const int source = *g.realized();
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    if (edge.periodic || edge.from != source) continue;
    const double j = current_into(state, edge);
    out.edge_currents.emplace_back(static_cast<int>(e), j);
    auto it = std::find(out.components.begin(), out.components.end(), edge.to);
    if (it != out.components.end()) out.hazards[static_cast<std::size_t>(it - out.components.begin())] += j;
  }
  for (double& h : out.hazards) h = std::max(0.0, h) / out.sigma;
  return out;
}

}  // namespace qcollapse
