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

#include <cstddef>
#include <vector>

#include "qtraj/numerics.hpp"
#include "qtraj/projective.hpp"
#include "qtraj/random.hpp"

namespace qtraj {

inline constexpr std::size_t kDefaultTransportBudget = 5000;
inline constexpr double kDuplicateRayTolerance = 1e-12;

// Finite weighted point set on projective space. Weights are positive and
// normalized to sum to one on construction.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;
  EmpiricalMeasure(std::vector<ProjectivePoint> points, std::vector<double> weights);

  static EmpiricalMeasure uniform(std::vector<ProjectivePoint> points);
  static EmpiricalMeasure dirac(const ProjectivePoint& x);

  const std::vector<ProjectivePoint>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  int dim() const { return points_.empty() ? 0 : points_.front().dim(); }

  // True when every weight equals 1/size() to 1e-12 relative.
  bool is_uniform() const;

  // Rays closer than `tolerance` in d are merged, adding their weights.
  // Representatives keep their relative input order.
  EmpiricalMeasure merged(double tolerance = kDuplicateRayTolerance) const;

  // rho_nu = sum_i w_i |x_i><x_i|.
  ComplexMatrix mean_projector() const;

  // Draws a point according to the weights.
  const ProjectivePoint& sample(Rng& rng) const;

 private:
  std::vector<ProjectivePoint> points_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

// Exact Wasserstein-1 distance for the ground cost d. Duplicate rays are
// merged first; equal-size uniform instances are solved as an assignment
// problem, anything else by network simplex. Throws a budget error when a
// merged side has more than `budget` support points.
double w1(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
          std::size_t budget = kDefaultTransportBudget);

// Uniform mixture (1/L) sum_l measures[l].
EmpiricalMeasure cesaro_mix(const std::vector<EmpiricalMeasure>& measures);

// Row-major cost matrix c_ij = d(a_i, b_j).
std::vector<double> distance_matrix(const std::vector<ProjectivePoint>& a,
                                    const std::vector<ProjectivePoint>& b);

}  // namespace qtraj
