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

#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qcollapse/graph.hpp"
#include "qcollapse/trace.hpp"

namespace qcollapse::oracle {

/// First-hit law implied by a hazard trace. The cumulative hazard is
/// integrated by the trapezoid rule and taken as linear between samples.
struct FirstHitDensity {
  std::vector<double> times;
  std::vector<int> components;
  std::vector<double> cumulative;  // integrated total hazard
  std::vector<double> survival;    // exp(-cumulative)
  std::vector<double> density;     // h_total(t) * survival(t)
  /// component_density[k][i]: density of a first hit on components[k].
  std::vector<std::vector<double>> component_density;
  /// component_mass[k]: probability that components[k] fires first within the trace.
  std::vector<double> component_mass;

  double cumulative_at(double t) const;
  double survival_at(double t) const;
  /// P(first hit <= t). Stays below 1 when the trace never exhausts the survival.
  double cdf(double t) const { return 1.0 - survival_at(t); }
  /// Smallest t with cdf(t) >= q, or the last trace time when never reached.
  double quantile(double q) const;
};

/// Throws EmptyTrace on an empty trace and InvalidArgument on ragged,
/// decreasing, or negative input.
FirstHitDensity first_hit_density(const HazardTrace& trace);

/// Probability mass in `bins` equal bins over [lo, hi) plus one trailing
/// entry for everything else (later hits and no hit at all).
std::vector<double> bin_masses(const FirstHitDensity& f, double lo, double hi, int bins);

/// Empirical counterpart of bin_masses; NaN or infinite samples go to the
/// trailing entry.
std::vector<double> empirical_masses(std::span<const double> samples, double lo, double hi, int bins);

/// Half the L1 distance between two probability vectors of equal length.
double total_variation(std::span<const double> p, std::span<const double> q);

/// One-sample Kolmogorov-Smirnov statistic over finite t. NaN or infinite
/// samples are hits that never happened; `cdf` may be defective.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Asymptotic 1% critical value of the one-sample KS statistic.
double ks_critical_1pct(std::size_t n);

double exponential_pdf(double t, double rate);
double exponential_cdf(double t, double rate);

/// Rate estimate from first-hit samples right-censored at `horizon`
/// (NaN = no hit): hits divided by total exposure.
double censored_exponential_rate(std::span<const double> samples, double horizon);

double binomial_sigma(std::size_t n, double p);

/// Labels of the chosen components, in firing order.
using Sequence = std::vector<std::string>;

/// Brute-force enumeration of every maximal collapse sequence allowed by
/// launch_set and apply_collapse. Throws TooLarge above 12 components and
/// InvalidArgument when the non-periodic edges contain a cycle.
std::set<Sequence> enumerate_sequences(const ComponentGraph& g);

inline constexpr int kMaxEnumerationComponents = 12;

}  // namespace qcollapse::oracle
