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

#include <functional>
#include <vector>

namespace qtraj {

struct AssignmentResult {
  std::vector<int> row_to_col;
  double total_cost = 0.0;
};

// Minimum-cost perfect matching for a dense n x n row-major cost matrix,
// using the Jonker-Volgenant shortest augmenting path method.
AssignmentResult solve_assignment(const std::vector<double>& cost, int n);

// Cost of pairing row i with column j, evaluated on demand.
using CostFunction = std::function<double(int, int)>;

// Exact minimum-cost perfect matching without storing the n x n matrix.
// Solves on the `candidates` cheapest columns of each row, then adds every
// pair that violates dual feasibility and repeats until none is left. Fast
// when optimal matchings use short edges, as for metric costs.
AssignmentResult solve_assignment_sparse(int n, const CostFunction& cost, int candidates = 64);

}  // namespace qtraj
