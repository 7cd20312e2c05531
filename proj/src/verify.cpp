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

#include "qcollapse/verify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "qcollapse/oracle.hpp"

namespace qcollapse {

VerifyResult verify_scenario(const ScenarioSpec& s, EngineConfig cfg, int trials) {
  cfg.max_collapses = 1;
  VerifyResult v;
  v.scenario = s.id;
  v.trials = trials;

  Simulator sim(s, cfg);
  sim.prepare_prefix();
  const auto law = oracle::first_hit_density(sim.hazard_trace());
  const auto records = run_records(sim, trials);

  std::vector<double> hits;
  hits.reserve(records.size());
  for (const auto& r : records) {
    hits.push_back(r.events.empty() ? std::nan("") : r.events.front().t_sc);
    v.replay_violations += replay_violations(s.graph, r);
  }
  const double q999 = law.quantile(0.999);
  v.horizon = std::min(cfg.t_max, q999 > law.times.front() ? q999 : cfg.t_max);
  const auto expected = oracle::bin_masses(law, 0.0, v.horizon, kTvBins);
  const auto observed = oracle::empirical_masses(hits, 0.0, v.horizon, kTvBins);
  v.tv = oracle::total_variation(expected, observed);
  v.ks = oracle::ks_statistic(hits, [&](double t) { return law.cdf(t); });
  v.ks_critical = oracle::ks_critical_1pct(hits.size());
  v.hit_fraction = static_cast<double>(std::count_if(hits.begin(), hits.end(), [](double x) { return !std::isnan(x); })) /
                   static_cast<double>(hits.size());
  v.oracle_hit_fraction = law.cdf(law.times.back());

  v.passed = v.tv <= kTvTolerance && v.ks < v.ks_critical && v.replay_violations == 0;
  if (v.tv > kTvTolerance) v.detail += "tv above " + std::to_string(kTvTolerance) + "; ";
  if (!(v.ks < v.ks_critical)) v.detail += "ks above critical value; ";
  if (v.replay_violations) v.detail += "replay violations; ";
  return v;
}

void write_verify_csv(std::ostream& out, const std::vector<VerifyResult>& results) {
  auto num = [](double x) { return nlohmann::json(x).dump(); };
  out << "scenario,trials,horizon,tv,tv_tolerance,ks,ks_critical,hit_fraction,oracle_hit_fraction,replay_violations,"
         "passed\n";
  for (const auto& v : results) {
    out << v.scenario << ',' << v.trials << ',' << num(v.horizon) << ',' << num(v.tv) << ',' << num(kTvTolerance)
        << ',' << num(v.ks) << ',' << num(v.ks_critical) << ',' << num(v.hit_fraction) << ','
        << num(v.oracle_hit_fraction) << ',' << v.replay_violations << ',' << (v.passed ? "true" : "false") << '\n';
  }
}

}  // namespace qcollapse
