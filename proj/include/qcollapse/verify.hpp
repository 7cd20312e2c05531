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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qcollapse/engine.hpp"

namespace qcollapse {

/// Pinned gates of the engine/oracle comparison.
inline constexpr double kTvTolerance = 0.02;
inline constexpr int kTvBins = 50;

struct VerifyResult {
  std::string scenario;
  int trials = 0;
  double horizon = 0.0;  // histogram range [0, horizon)
  double tv = 0.0;
  /// KS against the oracle first-hit CDF, and its 1% critical value.
  double ks = 0.0;
  double ks_critical = 0.0;
  /// Fraction of trajectories with a hit, engine and oracle.
  double hit_fraction = 0.0;
  double oracle_hit_fraction = 0.0;
  int replay_violations = 0;
  bool passed = false;
  std::string detail;
};

/// Runs `trials` first-hit trajectories (max_collapses = 1) and compares
/// them with the oracle law built from a collapse-suppressed hazard trace.
/// Passes when TV <= kTvTolerance, KS is below its critical value and no
/// event fails replay.
VerifyResult verify_scenario(const ScenarioSpec& s, EngineConfig cfg, int trials);

void write_verify_csv(std::ostream& out, const std::vector<VerifyResult>& results);

}  // namespace qcollapse
