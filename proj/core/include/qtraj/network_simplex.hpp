// Copyright 2026 The qtraj Authors
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

#include <vector>

namespace qtraj {

struct TransportPlanEntry {
  int source = 0;
  int sink = 0;
  double mass = 0.0;
};

struct TransportResult {
  double total_cost = 0.0;
  std::vector<TransportPlanEntry> plan;  // basic cells with positive mass
  long long pivots = 0;
};

// Balanced transportation problem min sum c_ij f_ij subject to row sums
// `supply` and column sums `demand` (equal totals), solved by primal network
// simplex on the complete bipartite graph. `cost` is row-major
// supply.size() x demand.size() and must be non-negative.
TransportResult solve_transport(const std::vector<double>& supply,
                                const std::vector<double>& demand,
                                const std::vector<double>& cost);

}  // namespace qtraj
