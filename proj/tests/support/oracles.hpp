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

// Reference computations for the tests. They deliberately avoid the library
// routines they are used to check.

#include <utility>
#include <vector>

#include "qtraj/numerics.hpp"

namespace qtraj::oracle {

// Minimum transport cost found by enumerating every basic solution of the
// transportation polytope. Meant for na * nb <= 16.
double transport_by_vertices(const std::vector<double>& a, const std::vector<double>& b,
                             const std::vector<double>& cost);

// Rank of a real matrix by Gaussian elimination with full pivoting.
int real_rank(std::vector<std::vector<double>> a, double tol);

// Dimension of {X : sum_i w_i v_i X v_i* = X}, from the real 2k^2 x 2k^2
// form of the channel.
int fixed_point_dimension(const std::vector<double>& weights,
                          const std::vector<ComplexMatrix>& elements);

// For 2x2 matrices a_1 a_2 = |det|, which is multiplicative, so
// f(n) = (sum_i w_i |det v_i|)^n.
double f_closed_form_2x2(const std::vector<double>& weights,
                         const std::vector<ComplexMatrix>& elements, int n);

// Singular values of a 2x2 complex matrix from the trace/determinant of A*A.
std::pair<double, double> singular_values_2x2(const ComplexMatrix& a);

}  // namespace qtraj::oracle
