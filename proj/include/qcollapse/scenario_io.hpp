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

#include <string>
#include <string_view>

#include "qcollapse/scenario.hpp"

namespace qcollapse {

inline constexpr const char* kScenarioFormat = "qcollapse-scenario/1";

/// Parses a scenario document (JSON). Index and row/col fields accept a
/// basis label or an integer position; edge endpoints accept a component
/// label or id.
///
/// Errors: SyntaxError with line and column for malformed JSON or wrong
/// field types; OverlappingComponents naming the shared basis label;
/// UnknownLabel; NonHermitianCoupling for inconsistent Hamiltonian terms;
/// NoRealizedComponent; InvalidArgument for any other failed scenario check.
ScenarioSpec parse_scenario(std::string_view text);

ScenarioSpec load_scenario(const std::string& path);

/// Inverse of parse_scenario. Hamiltonian terms already carried by edge
/// couplings are left out of the `hamiltonian` field.
std::string serialize_scenario(const ScenarioSpec& s);

}  // namespace qcollapse
