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

#include <optional>
#include <string>
#include <vector>

#include "qcollapse/types.hpp"

namespace qcollapse {

enum class Status { Realized, Ready, Dead };

const char* to_string(Status status);

/// An sm-component: a subspace of basis indices with a lifecycle status.
struct Component {
  int id = 0;
  std::string label;
  std::vector<Index> indices;
  Status status = Status::Ready;

  bool operator==(const Component&) const = default;
};

/// Hamiltonian element coupling `col` (a source index) to `row` (a target
/// index). The Hermitian partner is implied.
struct Coupling {
  Index row = 0;
  Index col = 0;
  Complex value;

  bool operator==(const Coupling&) const = default;
};

struct JumpEdge {
  int from = 0;
  int to = 0;
  bool periodic = false;
  std::vector<Coupling> couplings;

  bool operator==(const JumpEdge&) const = default;
};

/// Component graph of one basis partition. Component ids equal their position in
/// `components`.
struct ComponentGraph {
  std::vector<Component> components;
  std::vector<JumpEdge> edges;

  const Component& component(int id) const;
  std::optional<int> realized() const;
  /// Components whose amplitudes evolve: Realized and Ready.
  std::vector<bool> live_mask() const;

  bool operator==(const ComponentGraph&) const = default;
};

/// Ready components that receive a non-periodic edge from the Realized one.
/// Throws NoRealizedComponent if the graph has none.
std::vector<int> launch_set(const ComponentGraph& g);

/// The chosen component becomes Realized. Every component reachable from it
/// along non-periodic edges becomes Ready (fresh instance); every other
/// component becomes Dead. Throws NotALaunchComponent.
ComponentGraph apply_collapse(const ComponentGraph& g, int chosen);

/// True when the realized component has no outbound non-periodic edge.
bool is_absorbing(const ComponentGraph& g);

enum class ViolationKind {
  OverlappingComponents,
  NoRealizedComponent,
  MultipleRealized,
  IndexOutOfRange,
  UncoveredIndex,
  BadComponentId,
  UnknownEndpoint,
  SelfLoop,
  CouplingOutsideEndpoints,
  UnreachableReady,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
  Index index = -1;

  bool operator==(const Violation&) const = default;
};

/// Static invariant check. Pass the basis dimension to also check index
/// ranges and coverage; pass 0 to skip those.
std::vector<Violation> validate(const ComponentGraph& g, Index dimension = 0);

}  // namespace qcollapse
