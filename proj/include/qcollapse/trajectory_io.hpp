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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcollapse/engine.hpp"

namespace qcollapse {

/// One JSONL line: scenario, trajectory index, seed, events (t_sc, chosen,
/// label, sigma_before, hazard_at_fire, relaunch_norm), final, termination,
/// sigma_drift.
std::string trajectory_line(const ScenarioSpec& s, std::size_t index, const TrajectoryRecord& r);

struct StoredTrajectory {
  std::size_t index = 0;
  TrajectoryRecord record;
  std::vector<std::string> event_labels;
};

/// Throws SyntaxError (line = record number) on malformed lines. Blank
/// lines are skipped.
std::vector<StoredTrajectory> read_trajectories(std::istream& in);

/// Rows of the stats CSV (`section,key,lo,hi,value`).
struct StatsTable {
  struct Row {
    std::string section;
    std::string key;
    std::optional<double> lo;
    std::optional<double> hi;
    double value = 0.0;
  };
  std::vector<Row> rows;

  void write_csv(std::ostream& out) const;
  /// First row with this section and key, if any.
  std::optional<double> find(const std::string& section, const std::string& key) const;
};

inline constexpr int kStatsBins = 50;

/// First-hit histogram over [0, horizon) in 50 bins, a no_hit row for
/// trajectories without events, per-final-label counts, event count mean
/// and variance, termination counts and ordering violations. `initial`
/// enables launch-set replay; without it only t_sc ordering is checked.
StatsTable trajectory_stats(std::span<const StoredTrajectory> trajectories, double horizon,
                            const ComponentGraph* initial = nullptr);

/// Everything that determines a `run` output file.
struct RunManifest {
  std::string scenario;  // builtin id or scenario file path
  std::map<std::string, double> params;
  EngineConfig config;
  int trials = 1;
  std::string out;

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
};

inline constexpr const char* kManifestFormat = "qcollapse-manifest/1";

/// Builtin id (with params) or a path to a scenario file.
ScenarioSpec resolve_scenario(const std::string& ref, const std::map<std::string, double>& params = {});

/// Runs the manifest's ensemble and writes one line per trajectory, in
/// trajectory order. Returns the records.
std::vector<TrajectoryRecord> write_run(const RunManifest& m, std::ostream& out);

}  // namespace qcollapse
