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

#include "qcollapse/rng.hpp"

namespace qcollapse {

std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64((index + 1) * kGoldenGamma));
}

}  // namespace qcollapse
