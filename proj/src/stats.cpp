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

#include "qcollapse/stats.hpp"

#include <cmath>
#include <numeric>

#include "qcollapse/types.hpp"

namespace qcollapse {

Histogram::Histogram(double lo_, double hi_, int bins) : lo(lo_), hi(hi_), counts(static_cast<std::size_t>(bins), 0) {
  if (bins < 1 || !(hi_ > lo_)) throw Error(ErrorCode::InvalidArgument, "histogram needs bins >= 1 and hi > lo");
}

void Histogram::add(double x) {
  if (!(x >= lo) || !(x < hi)) {
    ++overflow;
    return;
  }
  auto b = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(counts.size()));
  if (b >= counts.size()) b = counts.size() - 1;
  ++counts[b];
}

std::int64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), overflow);
}

double Histogram::bin_lo(int b) const { return lo + (hi - lo) * b / bins(); }
double Histogram::bin_hi(int b) const { return lo + (hi - lo) * (b + 1) / bins(); }

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

}  // namespace qcollapse
