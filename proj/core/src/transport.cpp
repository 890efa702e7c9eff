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

#include "qtraj/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qtraj/assignment.hpp"
#include "qtraj/error.hpp"
#include "qtraj/network_simplex.hpp"

namespace qtraj {
namespace {

// Rays within the merge tolerance have nearly equal representatives (the
// phase convention pins them down), so a sort on Re x_0 brings candidates
// next to each other.
constexpr double kSortWindow = 1e-9;

// Above this size the matching runs on a candidate graph instead of the
// dense cost matrix.
constexpr std::size_t kDenseAssignmentLimit = 1024;

void require_same_dim(const std::vector<ProjectivePoint>& points) {
  for (const auto& p : points) {
    if (p.dim() != points.front().dim()) {
      throw Error(ErrorKind::kInvalidInput, "empirical measure mixes dimensions");
    }
  }
}

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(std::vector<ProjectivePoint> points,
                                   std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty()) throw Error(ErrorKind::kInvalidInput, "empirical measure has no points");
  if (points_.size() != weights_.size()) {
    throw Error(ErrorKind::kInvalidInput, "empirical measure: points and weights differ in size");
  }
  require_same_dim(points_);
  double total = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::kInvalidInput, "empirical measure weights must be positive");
    }
    total += w;
  }
  cumulative_.reserve(weights_.size());
  double running = 0.0;
  for (double& w : weights_) {
    w /= total;
    running += w;
    cumulative_.push_back(running);
  }
}

EmpiricalMeasure EmpiricalMeasure::uniform(std::vector<ProjectivePoint> points) {
  std::vector<double> weights(points.size(), 1.0);
  return EmpiricalMeasure(std::move(points), std::move(weights));
}

EmpiricalMeasure EmpiricalMeasure::dirac(const ProjectivePoint& x) {
  return EmpiricalMeasure({x}, {1.0});
}

bool EmpiricalMeasure::is_uniform() const {
  const double expected = 1.0 / static_cast<double>(weights_.size());
  return std::all_of(weights_.begin(), weights_.end(),
                     [&](double w) { return std::abs(w - expected) <= 1e-12 * expected; });
}

EmpiricalMeasure EmpiricalMeasure::merged(double tolerance) const {
  const std::size_t n = points_.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> key(n);
  for (std::size_t i = 0; i < n; ++i) key[i] = points_[i].vector()(0).real();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });

  // owner[i] = index (input order) of the cluster representative for i.
  std::vector<std::size_t> owner(n);
  std::iota(owner.begin(), owner.end(), 0);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t i = order[a];
    if (owner[i] != i) continue;
    for (std::size_t b = a + 1; b < n && key[order[b]] - key[i] <= kSortWindow; ++b) {
      const std::size_t j = order[b];
      if (owner[j] != j) continue;
      if (distance(points_[i], points_[j]) <= tolerance) owner[j] = i;
    }
  }
  std::vector<ProjectivePoint> points;
  std::vector<double> weights;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (owner[i] == i) {
      slot[i] = points.size();
      points.push_back(points_[i]);
      weights.push_back(0.0);
    }
  }
  for (std::size_t i = 0; i < n; ++i) weights[slot[owner[i]]] += weights_[i];
  return EmpiricalMeasure(std::move(points), std::move(weights));
}

ComplexMatrix EmpiricalMeasure::mean_projector() const {
  if (points_.empty()) throw Error(ErrorKind::kInvalidInput, "empirical measure has no points");
  const int k = dim();
  ComplexMatrix rho = ComplexMatrix::Zero(k, k);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const ComplexVector& x = points_[i].vector();
    rho.noalias() += weights_[i] * (x * x.adjoint());
  }
  return rho;
}

const ProjectivePoint& EmpiricalMeasure::sample(Rng& rng) const {
  if (points_.empty()) throw Error(ErrorKind::kInvalidInput, "cannot sample an empty measure");
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                         points_.size() - 1);
  return points_[idx];
}

std::vector<double> distance_matrix(const std::vector<ProjectivePoint>& a,
                                    const std::vector<ProjectivePoint>& b) {
  std::vector<double> cost(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) cost[i * b.size() + j] = distance(a[i], b[j]);
  }
  return cost;
}

double w1(const EmpiricalMeasure& a, const EmpiricalMeasure& b, std::size_t budget) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::kInvalidInput, "w1 of an empty measure");
  if (a.dim() != b.dim()) throw Error(ErrorKind::kInvalidInput, "w1: dimension mismatch");
  const EmpiricalMeasure ma = a.merged();
  const EmpiricalMeasure mb = b.merged();
  if (ma.size() > budget || mb.size() > budget) {
    std::ostringstream msg;
    msg << "w1: " << std::max(ma.size(), mb.size()) << " support points exceed the budget of "
        << budget << "; subsample the measures or raise the budget";
    throw Error(ErrorKind::kBudget, msg.str());
  }
  if (ma.size() == mb.size() && ma.is_uniform() && mb.is_uniform()) {
    const int n = static_cast<int>(ma.size());
    if (ma.size() > kDenseAssignmentLimit) {
      const auto& pa = ma.points();
      const auto& pb = mb.points();
      const CostFunction cost = [&](int i, int j) {
        return distance(pa[static_cast<std::size_t>(i)], pb[static_cast<std::size_t>(j)]);
      };
      return solve_assignment_sparse(n, cost).total_cost / static_cast<double>(n);
    }
    return solve_assignment(distance_matrix(ma.points(), mb.points()), n).total_cost /
           static_cast<double>(n);
  }
  const std::vector<double> cost = distance_matrix(ma.points(), mb.points());
  return solve_transport(ma.weights(), mb.weights(), cost).total_cost;
}

EmpiricalMeasure cesaro_mix(const std::vector<EmpiricalMeasure>& measures) {
  if (measures.empty()) throw Error(ErrorKind::kInvalidInput, "cesaro_mix of an empty list");
  std::vector<ProjectivePoint> points;
  std::vector<double> weights;
  const double scale = 1.0 / static_cast<double>(measures.size());
  for (const auto& m : measures) {
    if (m.dim() != measures.front().dim()) {
      throw Error(ErrorKind::kInvalidInput, "cesaro_mix: dimension mismatch");
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      points.push_back(m.points()[i]);
      weights.push_back(m.weights()[i] * scale);
    }
  }
  return EmpiricalMeasure(std::move(points), std::move(weights));
}

}  // namespace qtraj
