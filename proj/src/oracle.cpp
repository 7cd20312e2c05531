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

#include "qcollapse/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qcollapse::oracle {

namespace {

// Index of the last sample time <= t, or -1 before the first.
std::ptrdiff_t segment_of(const std::vector<double>& times, double t) {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  return std::distance(times.begin(), it) - 1;
}

}  // namespace

double FirstHitDensity::cumulative_at(double t) const {
  const auto k = segment_of(times, t);
  if (k < 0) return 0.0;
  const auto i = static_cast<std::size_t>(k);
  if (i + 1 >= times.size()) return cumulative.back();
  const double w = (t - times[i]) / (times[i + 1] - times[i]);
  return cumulative[i] + w * (cumulative[i + 1] - cumulative[i]);
}

double FirstHitDensity::survival_at(double t) const { return std::exp(-cumulative_at(t)); }

double FirstHitDensity::quantile(double q) const {
  const double target = -std::log1p(-q);
  auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) return times.back();
  const auto i = static_cast<std::size_t>(std::distance(cumulative.begin(), it));
  if (i == 0) return times.front();
  const double span = cumulative[i] - cumulative[i - 1];
  return times[i - 1] + (times[i] - times[i - 1]) * (target - cumulative[i - 1]) / span;
}

FirstHitDensity first_hit_density(const HazardTrace& trace) {
  const std::size_t n = trace.times.size();
  if (n == 0) throw Error(ErrorCode::EmptyTrace, "hazard trace has no samples");
  if (trace.hazard_values.size() != trace.components.size()) {
    throw Error(ErrorCode::InvalidArgument, "one hazard series per component required");
  }
  for (const auto& series : trace.hazard_values) {
    if (series.size() != n) throw Error(ErrorCode::InvalidArgument, "hazard series length differs from times");
    for (double h : series) {
      if (!(h >= 0.0)) throw Error(ErrorCode::InvalidArgument, "hazards must be >= 0");
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(trace.times[i] > trace.times[i - 1])) throw Error(ErrorCode::InvalidArgument, "times must increase");
  }

  FirstHitDensity f;
  f.times = trace.times;
  f.components = trace.components;
  const std::size_t m = trace.components.size();
  std::vector<double> total(n, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < n; ++i) total[i] += trace.hazard_values[k][i];
  }
  f.cumulative.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    f.cumulative[i] = f.cumulative[i - 1] + 0.5 * (trace.times[i] - trace.times[i - 1]) * (total[i] + total[i - 1]);
  }
  f.survival.resize(n);
  f.density.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    f.survival[i] = std::exp(-f.cumulative[i]);
    f.density[i] = total[i] * f.survival[i];
  }
  f.component_density.assign(m, std::vector<double>(n, 0.0));
  f.component_mass.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < n; ++i) f.component_density[k][i] = trace.hazard_values[k][i] * f.survival[i];
    // Within a segment the choice follows the integrated hazard share.
    for (std::size_t i = 1; i < n; ++i) {
      const double seg = f.cumulative[i] - f.cumulative[i - 1];
      if (seg <= 0.0) continue;
      const double share =
          0.5 * (trace.times[i] - trace.times[i - 1]) * (trace.hazard_values[k][i] + trace.hazard_values[k][i - 1]) /
          seg;
      f.component_mass[k] += share * (f.survival[i - 1] - f.survival[i]);
    }
  }
  return f;
}

std::vector<double> bin_masses(const FirstHitDensity& f, double lo, double hi, int bins) {
  if (!(hi > lo) || bins < 1) throw Error(ErrorCode::InvalidArgument, "bad histogram range");
  std::vector<double> out(static_cast<std::size_t>(bins) + 1, 0.0);
  const double width = (hi - lo) / bins;
  double accounted = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double a = lo + b * width;
    const double c = b + 1 == bins ? hi : lo + (b + 1) * width;
    out[static_cast<std::size_t>(b)] = f.survival_at(a) - f.survival_at(c);
    accounted += out[static_cast<std::size_t>(b)];
  }
  out.back() = std::max(0.0, 1.0 - accounted);
  return out;
}

std::vector<double> empirical_masses(std::span<const double> samples, double lo, double hi, int bins) {
  if (!(hi > lo) || bins < 1) throw Error(ErrorCode::InvalidArgument, "bad histogram range");
  std::vector<double> out(static_cast<std::size_t>(bins) + 1, 0.0);
  if (samples.empty()) return out;
  const double width = (hi - lo) / bins;
  for (double x : samples) {
    if (std::isfinite(x) && x >= lo && x < hi) {
      auto b = std::min(static_cast<std::size_t>((x - lo) / width), static_cast<std::size_t>(bins - 1));
      out[b] += 1.0;
    } else {
      out.back() += 1.0;
    }
  }
  for (double& v : out) v /= static_cast<double>(samples.size());
  return out;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::InvalidArgument, "distributions differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "no samples");
  std::vector<double> xs;
  for (double x : samples) {
    if (std::isfinite(x)) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fx = cdf(xs[i]);
    d = std::max({d, fx - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - fx});
  }
  // Missing hits sit at infinity; compare the finite tails.
  const double tail = cdf(std::numeric_limits<double>::max());
  return std::max(d, std::abs(tail - static_cast<double>(xs.size()) / n));
}

double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

double exponential_pdf(double t, double rate) { return t < 0.0 ? 0.0 : rate * std::exp(-rate * t); }

double exponential_cdf(double t, double rate) { return t < 0.0 ? 0.0 : -std::expm1(-rate * t); }

double censored_exponential_rate(std::span<const double> samples, double horizon) {
  double hits = 0.0, exposure = 0.0;
  for (double x : samples) {
    if (std::isfinite(x) && x <= horizon) {
      hits += 1.0;
      exposure += x;
    } else {
      exposure += horizon;
    }
  }
  return exposure > 0.0 ? hits / exposure : 0.0;
}

double binomial_sigma(std::size_t n, double p) { return std::sqrt(static_cast<double>(n) * p * (1.0 - p)); }

namespace {

bool has_cycle(const ComponentGraph& g) {
  const std::size_t n = g.components.size();
  std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::function<bool(int)> visit = [&](int v) {
    state[static_cast<std::size_t>(v)] = 1;
    for (const auto& e : g.edges) {
      if (e.periodic || e.from != v) continue;
      const int s = state[static_cast<std::size_t>(e.to)];
      if (s == 1) return true;
      if (s == 0 && visit(e.to)) return true;
    }
    state[static_cast<std::size_t>(v)] = 2;
    return false;
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (state[v] == 0 && visit(static_cast<int>(v))) return true;
  }
  return false;
}

void extend(const ComponentGraph& g, Sequence& prefix, std::set<Sequence>& out) {
  const auto launch = launch_set(g);
  if (launch.empty()) {
    out.insert(prefix);
    return;
  }
  for (int c : launch) {
    prefix.push_back(g.component(c).label);
    extend(apply_collapse(g, c), prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::set<Sequence> enumerate_sequences(const ComponentGraph& g) {
  if (g.components.size() > static_cast<std::size_t>(kMaxEnumerationComponents)) {
    throw Error(ErrorCode::TooLarge, std::to_string(g.components.size()) + " components exceed the limit of " +
                                         std::to_string(kMaxEnumerationComponents));
  }
  if (has_cycle(g)) throw Error(ErrorCode::InvalidArgument, "jump graph has a non-periodic cycle");
  std::set<Sequence> out;
  Sequence prefix;
  extend(g, prefix, out);
  return out;
}

}  // namespace qcollapse::oracle
