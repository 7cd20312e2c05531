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

#include <cstdint>
#include <span>
#include <vector>

namespace qcollapse {

/// Fixed-width bins on [lo, hi). Samples outside the range (or NaN for
/// "never happened") land in `overflow`.
struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::int64_t> counts;
  std::int64_t overflow = 0;

  Histogram(double lo, double hi, int bins);

  void add(double x);
  std::int64_t total() const;
  double bin_lo(int b) const;
  double bin_hi(int b) const;
  int bins() const { return static_cast<int>(counts.size()); }
};

double mean(std::span<const double> xs);
/// Unbiased sample variance (0 for fewer than two samples).
double variance(std::span<const double> xs);

}  // namespace qcollapse
