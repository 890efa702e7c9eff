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

#include "qtraj/numerics.hpp"
#include "qtraj/random.hpp"

namespace qtraj {

// Rays below this norm are treated as the zero vector.
inline constexpr double kAnnihilationThreshold = 1e-150;

// A point of complex projective space, stored as a unit representative whose
// first non-negligible component is real and positive.
class ProjectivePoint {
 public:
  static ProjectivePoint from_vector(const ComplexVector& x);

  // Basis ray e_i (0-based index).
  static ProjectivePoint basis(int dim, int index);

  const ComplexVector& vector() const { return vector_; }
  int dim() const { return static_cast<int>(vector_.size()); }

  // Rank-one projector |x><x|.
  ComplexMatrix projector() const;

 private:
  explicit ProjectivePoint(ComplexVector v) : vector_(std::move(v)) {}
  ComplexVector vector_;
};

// d(x, y) = (1 - |<x, y>|^2)^(1/2) on unit representatives.
double distance(const ProjectivePoint& x, const ProjectivePoint& y);

// Ray of A x; throws an annihilation error when |A x| <= 1e-150. Call as
// qtraj::apply: an unqualified call can resolve to std::apply through ADL.
ProjectivePoint apply(const ComplexMatrix& a, const ProjectivePoint& x);

// Ray of a standard complex Gaussian vector (unitarily invariant law).
ProjectivePoint sample_fubini_study(int dim, Rng& rng);

}  // namespace qtraj
