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

#include "qcollapse/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace qcollapse {

const char* to_string(Status status) {
  switch (status) {
    case Status::Realized: return "realized";
    case Status::Ready: return "ready";
    case Status::Dead: return "dead";
  }
  return "unknown";
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::OverlappingComponents: return "OverlappingComponents";
    case ViolationKind::NoRealizedComponent: return "NoRealizedComponent";
    case ViolationKind::MultipleRealized: return "MultipleRealized";
    case ViolationKind::IndexOutOfRange: return "IndexOutOfRange";
    case ViolationKind::UncoveredIndex: return "UncoveredIndex";
    case ViolationKind::BadComponentId: return "BadComponentId";
    case ViolationKind::UnknownEndpoint: return "UnknownEndpoint";
    case ViolationKind::SelfLoop: return "SelfLoop";
    case ViolationKind::CouplingOutsideEndpoints: return "CouplingOutsideEndpoints";
    case ViolationKind::UnreachableReady: return "UnreachableReady";
  }
  return "Unknown";
}

const Component& ComponentGraph::component(int id) const {
  if (id < 0 || id >= static_cast<int>(components.size())) {
    throw Error(ErrorCode::InvalidArgument, "no component with id " + std::to_string(id));
  }
  return components[static_cast<std::size_t>(id)];
}

std::optional<int> ComponentGraph::realized() const {
  for (const auto& c : components) {
    if (c.status == Status::Realized) return c.id;
  }
  return std::nullopt;
}

std::vector<bool> ComponentGraph::live_mask() const {
  std::vector<bool> mask(components.size());
  for (std::size_t i = 0; i < components.size(); ++i) mask[i] = components[i].status != Status::Dead;
  return mask;
}

std::vector<int> launch_set(const ComponentGraph& g) {
  auto source = g.realized();
  if (!source) throw Error(ErrorCode::NoRealizedComponent, "graph has no realized component");
  std::vector<int> out;
  for (const auto& e : g.edges) {
    if (e.periodic || e.from != *source) continue;
    if (g.component(e.to).status != Status::Ready) continue;
    if (std::find(out.begin(), out.end(), e.to) == out.end()) out.push_back(e.to);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ComponentGraph apply_collapse(const ComponentGraph& g, int chosen) {
  const auto launch = launch_set(g);
  if (std::find(launch.begin(), launch.end(), chosen) == launch.end()) {
    throw Error(ErrorCode::NotALaunchComponent,
                "component " + std::to_string(chosen) + " is not fed by the realized component");
  }
  std::vector<bool> reachable(g.components.size(), false);
  std::deque<int> frontier{chosen};
  while (!frontier.empty()) {
    int at = frontier.front();
    frontier.pop_front();
    for (const auto& e : g.edges) {
      if (e.periodic || e.from != at || e.to == chosen) continue;
      auto to = static_cast<std::size_t>(e.to);
      if (!reachable[to]) {
        reachable[to] = true;
        frontier.push_back(e.to);
      }
    }
  }
  ComponentGraph next = g;
  for (auto& c : next.components) {
    if (c.id == chosen) {
      c.status = Status::Realized;
    } else {
      c.status = reachable[static_cast<std::size_t>(c.id)] ? Status::Ready : Status::Dead;
    }
  }
  return next;
}

bool is_absorbing(const ComponentGraph& g) {
  auto source = g.realized();
  if (!source) throw Error(ErrorCode::NoRealizedComponent, "graph has no realized component");
  return std::none_of(g.edges.begin(), g.edges.end(),
                      [&](const JumpEdge& e) { return !e.periodic && e.from == *source; });
}

std::vector<Violation> validate(const ComponentGraph& g, Index dimension) {
  std::vector<Violation> out;
  const int n = static_cast<int>(g.components.size());

  std::map<Index, int> owner;
  int realized = 0;
  for (int i = 0; i < n; ++i) {
    const auto& c = g.components[static_cast<std::size_t>(i)];
    if (c.id != i) {
      out.push_back({ViolationKind::BadComponentId, "component at position " + std::to_string(i) +
                                                        " has id " + std::to_string(c.id)});
    }
    if (c.status == Status::Realized) ++realized;
    for (Index idx : c.indices) {
      if (dimension > 0 && (idx < 0 || idx >= dimension)) {
        out.push_back({ViolationKind::IndexOutOfRange, c.label, idx});
        continue;
      }
      auto [it, inserted] = owner.emplace(idx, i);
      if (!inserted) {
        out.push_back({ViolationKind::OverlappingComponents,
                       g.components[static_cast<std::size_t>(it->second)].label + " / " + c.label, idx});
      }
    }
  }
  for (Index idx = 0; idx < dimension; ++idx) {
    if (!owner.contains(idx)) out.push_back({ViolationKind::UncoveredIndex, "", idx});
  }
  if (realized == 0) out.push_back({ViolationKind::NoRealizedComponent, ""});
  if (realized > 1) out.push_back({ViolationKind::MultipleRealized, std::to_string(realized)});

  auto owned_by = [&](Index idx, int comp) {
    auto it = owner.find(idx);
    return it != owner.end() && it->second == comp;
  };
  for (const auto& e : g.edges) {
    const std::string name = std::to_string(e.from) + "->" + std::to_string(e.to);
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
      out.push_back({ViolationKind::UnknownEndpoint, name});
      continue;
    }
    if (e.from == e.to) out.push_back({ViolationKind::SelfLoop, name});
    for (const auto& c : e.couplings) {
      if (!owned_by(c.row, e.to) || !owned_by(c.col, e.from)) {
        out.push_back({ViolationKind::CouplingOutsideEndpoints, name, c.row});
      }
    }
  }

  if (realized == 1) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::deque<int> frontier{*g.realized()};
    seen[static_cast<std::size_t>(*g.realized())] = true;
    while (!frontier.empty()) {
      int at = frontier.front();
      frontier.pop_front();
      for (const auto& e : g.edges) {
        if (e.from != at || e.to < 0 || e.to >= n || seen[static_cast<std::size_t>(e.to)]) continue;
        seen[static_cast<std::size_t>(e.to)] = true;
        frontier.push_back(e.to);
      }
    }
    for (const auto& c : g.components) {
      if (c.status == Status::Ready && c.id >= 0 && c.id < n && !seen[static_cast<std::size_t>(c.id)]) {
        out.push_back({ViolationKind::UnreachableReady, c.label});
      }
    }
  }
  return out;
}

}  // namespace qcollapse
