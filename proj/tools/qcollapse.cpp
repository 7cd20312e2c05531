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

// qcollapse command line: run, stats, verify, list-scenarios, export.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "qcollapse/scenario_io.hpp"
#include "qcollapse/scenarios.hpp"
#include "qcollapse/trajectory_io.hpp"
#include "qcollapse/verify.hpp"

namespace {

using namespace qcollapse;

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kInputError = 2;

struct Options {
  std::string scenario;
  std::vector<std::string> params;
  int trials = 1000;
  std::uint64_t seed = 0;
  std::optional<double> dt;
  std::optional<double> t_max;
  std::string mode = "fresh";
  std::optional<int> max_collapses;
  std::string out;
  std::string in;
  std::string manifest;
  std::string save_manifest;
};

std::map<std::string, double> parse_params(const std::vector<std::string>& raw) {
  std::map<std::string, double> out;
  for (const auto& p : raw) {
    auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::InvalidArgument, "--param expects k=v, got '" + p + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(p.substr(eq + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != p.size() - eq - 1) throw Error(ErrorCode::InvalidArgument, "bad number in --param '" + p + "'");
    out[p.substr(0, eq)] = v;
  }
  return out;
}

EngineConfig make_config(const ScenarioSpec& s, const Options& o) {
  EngineConfig cfg = default_config(s);
  if (o.dt) cfg.dt = *o.dt;
  if (o.t_max) cfg.t_max = *o.t_max;
  cfg.seed = o.seed;
  if (o.mode == "fresh") {
    cfg.collapse_mode = CollapseMode::FreshSlice;
  } else if (o.mode == "projected") {
    cfg.collapse_mode = CollapseMode::Projected;
  } else {
    throw Error(ErrorCode::InvalidArgument, "--collapse-mode must be fresh or projected");
  }
  cfg.max_collapses = o.max_collapses;
  cfg.check();
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes to `path`, or stdout when empty. Files are replaced, not appended.
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  fn(out);
  if (!out) throw Error(ErrorCode::InvalidArgument, "write to '" + path + "' failed");
}

int cmd_list() {
  for (const auto& id : builtin_ids()) std::cout << std::left << std::setw(18) << id << builtin_description(id) << '\n';
  return kOk;
}

int cmd_run(const Options& o) {
  RunManifest m;
  if (!o.manifest.empty()) {
    m = RunManifest::from_json(read_file(o.manifest));
    if (!o.out.empty()) m.out = o.out;
  } else {
    if (o.scenario.empty()) throw Error(ErrorCode::InvalidArgument, "--scenario is required");
    m.scenario = o.scenario;
    m.params = parse_params(o.params);
    m.config = make_config(resolve_scenario(m.scenario, m.params), o);
    m.trials = o.trials;
    m.out = o.out;
  }
  if (m.trials < 1) throw Error(ErrorCode::InvalidArgument, "--trials must be >= 1");
  if (!o.save_manifest.empty()) with_output(o.save_manifest, [&](std::ostream& os) { os << m.to_json(); });
  with_output(m.out, [&](std::ostream& os) { write_run(m, os); });
  return kOk;
}

int cmd_stats(const Options& o) {
  if (o.in.empty()) throw Error(ErrorCode::InvalidArgument, "--in is required");
  std::ifstream in(o.in, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + o.in + "'");
  const auto trajectories = read_trajectories(in);
  if (trajectories.empty()) throw Error(ErrorCode::InvalidArgument, "'" + o.in + "' holds no trajectories");

  std::optional<ScenarioSpec> s;
  const std::string ref = o.scenario.empty() ? trajectories.front().record.scenario : o.scenario;
  try {
    s = resolve_scenario(ref, parse_params(o.params));
  } catch (const Error&) {
    if (!o.scenario.empty()) throw;  // an explicit reference must resolve
  }
  double horizon = 0.0;
  if (o.t_max) {
    horizon = *o.t_max;
  } else if (s) {
    horizon = s->meta("t_max", 0.0);
  }
  if (!(horizon > 0.0)) {
    for (const auto& t : trajectories) {
      for (const auto& e : t.record.events) horizon = std::max(horizon, std::nextafter(e.t_sc, INFINITY));
    }
    if (!(horizon > 0.0)) horizon = 1.0;
  }
  const auto table = trajectory_stats(trajectories, horizon, s ? &s->graph : nullptr);
  with_output(o.out, [&](std::ostream& os) { table.write_csv(os); });
  return kOk;
}

int cmd_verify(const Options& o) {
  if (o.scenario.empty()) throw Error(ErrorCode::InvalidArgument, "--scenario is required (an id, a path or 'all')");
  std::vector<ScenarioSpec> scenarios;
  if (o.scenario == "all") {
    for (const auto& id : builtin_ids()) scenarios.push_back(build_builtin(id));
  } else {
    scenarios.push_back(resolve_scenario(o.scenario, parse_params(o.params)));
  }
  std::vector<VerifyResult> results;
  bool ok = true;
  std::cout << std::left << std::setw(18) << "scenario" << std::setw(10) << "tv" << std::setw(10) << "ks"
            << std::setw(10) << "ks_crit" << "result\n";
  for (const auto& s : scenarios) {
    auto v = verify_scenario(s, make_config(s, o), o.trials);
    ok = ok && v.passed;
    std::cout << std::left << std::setw(18) << v.scenario << std::setw(10) << std::setprecision(4) << v.tv
              << std::setw(10) << v.ks << std::setw(10) << v.ks_critical << (v.passed ? "PASS" : "FAIL ") << v.detail
              << '\n';
    results.push_back(std::move(v));
  }
  if (!o.out.empty()) with_output(o.out, [&](std::ostream& os) { write_verify_csv(os, results); });
  return ok ? kOk : kVerifyFailed;
}

int cmd_export(const Options& o) {
  if (o.scenario.empty()) throw Error(ErrorCode::InvalidArgument, "--scenario is required");
  const auto s = resolve_scenario(o.scenario, parse_params(o.params));
  with_output(o.out, [&](std::ostream& os) { os << serialize_scenario(s); });
  return kOk;
}

void add_scenario(CLI::App* cmd, Options& o) {
  cmd->add_option("--scenario", o.scenario, "builtin id or scenario file");
  cmd->add_option("--param", o.params, "builtin parameter k=v (repeatable)");
}

void add_engine(CLI::App* cmd, Options& o) {
  cmd->add_option("--trials", o.trials, "number of trajectories")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--dt", o.dt, "engine step")->check(CLI::PositiveNumber);
  cmd->add_option("--t-max", o.t_max, "horizon")->check(CLI::PositiveNumber);
  cmd->add_option("--collapse-mode", o.mode, "fresh|projected")->check(CLI::IsMember({"fresh", "projected"}));
  cmd->add_option("--max-collapses", o.max_collapses, "stop after this many events")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcollapse: stochastic wave-collapse engine"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "simulate trajectories, one JSON line each");
  add_scenario(run, o);
  add_engine(run, o);
  run->add_option("--out", o.out, "trajectory file (default stdout)");
  run->add_option("--manifest", o.manifest, "take every setting from a run manifest");
  run->add_option("--save-manifest", o.save_manifest, "write the run manifest here");

  auto* stats = app.add_subcommand("stats", "summarize a trajectory file as CSV");
  stats->add_option("--in", o.in, "trajectory file")->required();
  add_scenario(stats, o);
  stats->add_option("--t-max", o.t_max, "histogram range [0, t-max)")->check(CLI::PositiveNumber);
  stats->add_option("--out", o.out, "CSV file (default stdout)");

  auto* verify = app.add_subcommand("verify", "compare engine first-hit statistics with the oracle");
  add_scenario(verify, o);
  add_engine(verify, o);
  verify->get_option("--trials")->default_val(100000);
  verify->add_option("--out", o.out, "CSV of histogram distances");

  auto* list = app.add_subcommand("list-scenarios", "print builtin scenario ids");
  auto* exp = app.add_subcommand("export", "write a scenario file");
  add_scenario(exp, o);
  exp->add_option("--out", o.out, "scenario file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*list) return cmd_list();
    if (*run) return cmd_run(o);
    if (*stats) return cmd_stats(o);
    if (*verify) return cmd_verify(o);
    if (*exp) return cmd_export(o);
  } catch (const SyntaxError& e) {
    std::cerr << "qcollapse: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "qcollapse: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "qcollapse: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}
