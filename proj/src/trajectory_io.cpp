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

#include "qcollapse/trajectory_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <istream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "qcollapse/scenario_io.hpp"
#include "qcollapse/scenarios.hpp"
#include "qcollapse/stats.hpp"

namespace qcollapse {

using nlohmann::json;
using nlohmann::ordered_json;

std::string trajectory_line(const ScenarioSpec& s, std::size_t index, const TrajectoryRecord& r) {
  ordered_json j;
  j["scenario"] = r.scenario;
  j["trajectory"] = index;
  j["seed"] = r.seed;
  ordered_json events = ordered_json::array();
  for (const auto& e : r.events) {
    events.push_back({{"t_sc", e.t_sc},
                      {"chosen", e.chosen},
                      {"label", s.graph.component(e.chosen).label},
                      {"sigma_before", e.sigma_before},
                      {"hazard_at_fire", e.hazard_at_fire},
                      {"relaunch_norm", e.relaunch_norm}});
  }
  j["events"] = events;
  j["final"] = r.final_label;
  j["termination"] = to_string(r.terminated);
  j["sigma_drift"] = r.max_sigma_drift;
  return j.dump();
}

namespace {

Termination parse_termination(const std::string& s) {
  if (s == "horizon") return Termination::Horizon;
  if (s == "max_collapses") return Termination::MaxCollapses;
  if (s == "absorbed") return Termination::Absorbed;
  throw Error(ErrorCode::InvalidArgument, "unknown termination '" + s + "'");
}

}  // namespace

std::vector<StoredTrajectory> read_trajectories(std::istream& in) {
  std::vector<StoredTrajectory> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      StoredTrajectory t;
      t.index = j.at("trajectory").get<std::size_t>();
      t.record.scenario = j.at("scenario").get<std::string>();
      t.record.seed = j.at("seed").get<std::uint64_t>();
      for (const auto& e : j.at("events")) {
        t.record.events.push_back({e.at("t_sc").get<double>(), e.at("chosen").get<int>(),
                                   e.value("sigma_before", 0.0), e.value("hazard_at_fire", 0.0),
                                   e.value("relaunch_norm", 0.0)});
        t.event_labels.push_back(e.value("label", std::string{}));
      }
      t.record.final_label = j.at("final").get<std::string>();
      t.record.terminated = parse_termination(j.at("termination").get<std::string>());
      t.record.max_sigma_drift = j.value("sigma_drift", 0.0);
      out.push_back(std::move(t));
    } catch (const json::exception& e) {
      throw SyntaxError(ErrorCode::SyntaxError, number, 1, e.what());
    }
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string csv_number(double v) {
  json j = v;
  return j.dump();
}

}  // namespace

void StatsTable::write_csv(std::ostream& out) const {
  out << "section,key,lo,hi,value\n";
  for (const auto& r : rows) {
    out << csv_field(r.section) << ',' << csv_field(r.key) << ',' << (r.lo ? csv_number(*r.lo) : "") << ','
        << (r.hi ? csv_number(*r.hi) : "") << ',' << csv_number(r.value) << '\n';
  }
}

std::optional<double> StatsTable::find(const std::string& section, const std::string& key) const {
  for (const auto& r : rows) {
    if (r.section == section && r.key == key) return r.value;
  }
  return std::nullopt;
}

StatsTable trajectory_stats(std::span<const StoredTrajectory> trajectories, double horizon,
                            const ComponentGraph* initial) {
  if (!(horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "histogram horizon must be > 0");
  StatsTable t;
  Histogram hist(0.0, horizon, kStatsBins);
  std::int64_t no_hit = 0;
  std::map<std::string, int> finals;
  std::map<std::string, int> terminations;
  std::vector<double> counts;
  int violations = 0;
  for (const auto& tr : trajectories) {
    const auto& r = tr.record;
    if (r.events.empty()) {
      ++no_hit;
    } else {
      hist.add(r.events.front().t_sc);
    }
    ++finals[r.final_label];
    ++terminations[to_string(r.terminated)];
    counts.push_back(static_cast<double>(r.events.size()));
    if (initial) {
      violations += replay_violations(*initial, r);
    } else {
      for (std::size_t i = 1; i < r.events.size(); ++i) {
        if (!(r.events[i].t_sc > r.events[i - 1].t_sc)) ++violations;
      }
    }
  }
  t.rows.push_back({"trials", "count", std::nullopt, std::nullopt, static_cast<double>(trajectories.size())});
  for (int b = 0; b < hist.bins(); ++b) {
    t.rows.push_back({"first_hit", "bin_" + std::to_string(b), hist.bin_lo(b), hist.bin_hi(b),
                      static_cast<double>(hist.counts[static_cast<std::size_t>(b)])});
  }
  t.rows.push_back({"first_hit", "beyond", horizon, std::nullopt, static_cast<double>(hist.overflow)});
  t.rows.push_back({"first_hit", "no_hit", std::nullopt, std::nullopt, static_cast<double>(no_hit)});
  for (const auto& [label, n] : finals) t.rows.push_back({"final_label", label, std::nullopt, std::nullopt, double(n)});
  for (const auto& [kind, n] : terminations) {
    t.rows.push_back({"termination", kind, std::nullopt, std::nullopt, double(n)});
  }
  t.rows.push_back({"events", "mean", std::nullopt, std::nullopt, counts.empty() ? 0.0 : mean(counts)});
  t.rows.push_back({"events", "variance", std::nullopt, std::nullopt, variance(counts)});
  t.rows.push_back({"ordering", "violations", std::nullopt, std::nullopt, static_cast<double>(violations)});
  return t;
}

std::string RunManifest::to_json() const {
  ordered_json j;
  j["format"] = kManifestFormat;
  j["scenario"] = scenario;
  j["params"] = params;
  j["trials"] = trials;
  j["seed"] = config.seed;
  j["dt"] = config.dt;
  j["t_max"] = config.t_max;
  j["hazard_cap"] = config.hazard_cap;
  j["collapse_mode"] = to_string(config.collapse_mode);
  j["max_collapses"] = config.max_collapses ? json(*config.max_collapses) : json(nullptr);
  j["relaunch_scale"] = config.relaunch_scale;
  j["out"] = out;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SyntaxError(ErrorCode::SyntaxError, 1, static_cast<int>(e.byte), e.what());
  }
  RunManifest m;
  try {
    if (j.value("format", std::string(kManifestFormat)) != kManifestFormat) {
      throw Error(ErrorCode::InvalidArgument, "unsupported manifest format");
    }
    m.scenario = j.at("scenario").get<std::string>();
    m.params = j.value("params", std::map<std::string, double>{});
    m.trials = j.at("trials").get<int>();
    m.config.seed = j.value("seed", std::uint64_t{0});
    m.config.dt = j.at("dt").get<double>();
    m.config.t_max = j.at("t_max").get<double>();
    m.config.hazard_cap = j.value("hazard_cap", m.config.hazard_cap);
    const std::string mode = j.value("collapse_mode", std::string("fresh_slice"));
    if (mode == "fresh_slice") {
      m.config.collapse_mode = CollapseMode::FreshSlice;
    } else if (mode == "projected") {
      m.config.collapse_mode = CollapseMode::Projected;
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown collapse_mode '" + mode + "'");
    }
    if (j.contains("max_collapses") && !j["max_collapses"].is_null()) {
      m.config.max_collapses = j["max_collapses"].get<int>();
    }
    m.config.relaunch_scale = j.value("relaunch_scale", 1.0);
    m.out = j.value("out", std::string{});
  } catch (const json::exception& e) {
    throw SyntaxError(ErrorCode::SyntaxError, 1, 1, e.what());
  }
  if (m.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  m.config.check();
  return m;
}

ScenarioSpec resolve_scenario(const std::string& ref, const std::map<std::string, double>& params) {
  const auto ids = builtin_ids();
  if (std::find(ids.begin(), ids.end(), ref) != ids.end()) return build_builtin(ref, params);
  if (!std::filesystem::exists(ref)) {
    throw Error(ErrorCode::InvalidArgument, "'" + ref + "' is neither a builtin scenario nor a file");
  }
  if (!params.empty()) throw Error(ErrorCode::InvalidArgument, "parameters apply to builtin scenarios only");
  return load_scenario(ref);
}

std::vector<TrajectoryRecord> write_run(const RunManifest& m, std::ostream& out) {
  const ScenarioSpec s = resolve_scenario(m.scenario, m.params);
  Simulator sim(s, m.config);
  sim.prepare_prefix();
  auto records = run_records(sim, m.trials);
  for (std::size_t i = 0; i < records.size(); ++i) out << trajectory_line(s, i, records[i]) << '\n';
  return records;
}

}  // namespace qcollapse
