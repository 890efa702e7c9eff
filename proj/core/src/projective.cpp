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

#include "qtraj/projective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qtraj/error.hpp"

namespace qtraj {

ProjectivePoint ProjectivePoint::from_vector(const ComplexVector& x) {
  if (x.size() == 0) {
    throw Error(ErrorKind::kInvalidInput, "from_vector: empty vector");
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x(i).real()) || !std::isfinite(x(i).imag())) {
      throw Error(ErrorKind::kInvalidInput, "from_vector: non-finite component");
    }
  }
  // Rescale before taking the norm so that tiny but valid vectors survive.
  const double scale = x.cwiseAbs().maxCoeff();
  if (!(scale * std::sqrt(static_cast<double>(x.size())) > kAnnihilationThreshold) ||
      x.norm() <= kAnnihilationThreshold) {
    throw Error(ErrorKind::kZeroVector, "from_vector: vector is numerically zero");
  }
  ComplexVector v = x / scale;
  v /= v.norm();
  numerics::apply_phase_convention(v);
  return ProjectivePoint(std::move(v));
}

ProjectivePoint ProjectivePoint::basis(int dim, int index) {
  if (dim < 1 || index < 0 || index >= dim) {
    throw Error(ErrorKind::kInvalidInput, "basis: index out of range");
  }
  ComplexVector v = ComplexVector::Zero(dim);
  v(index) = 1.0;
  return ProjectivePoint(std::move(v));
}

ComplexMatrix ProjectivePoint::projector() const {
  return vector_ * vector_.adjoint();
}

double distance(const ProjectivePoint& x, const ProjectivePoint& y) {
  if (x.dim() != y.dim()) {
    throw Error(ErrorKind::kInvalidInput,
                "distance: dimension mismatch (" + std::to_string(x.dim()) + " vs " +
                    std::to_string(y.dim()) + ")");
  }
  // Wedge form sum_{i<j} |x_i y_j - x_j y_i|^2: exactly symmetric in (x, y)
  // and accurate for nearby rays, unlike 1 - |<x,y>|^2.
  const ComplexVector& a = x.vector();
  const ComplexVector& b = y.vector();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = i + 1; j < a.size(); ++j) {
      sum += std::norm(a(i) * b(j) - a(j) * b(i));
    }
  }
  return std::min(std::sqrt(sum), 1.0);
}

ProjectivePoint apply(const ComplexMatrix& a, const ProjectivePoint& x) {
  if (a.rows() != a.cols() || a.cols() != x.dim()) {
    throw Error(ErrorKind::kInvalidInput, "apply: matrix does not match the point dimension");
  }
  const ComplexVector y = a * x.vector();
  if (y.norm() <= kAnnihilationThreshold) {
    throw Error(ErrorKind::kAnnihilation, "apply: the matrix annihilates the ray");
  }
  return ProjectivePoint::from_vector(y);
}

ProjectivePoint sample_fubini_study(int dim, Rng& rng) {
  if (dim < 1) throw Error(ErrorKind::kInvalidInput, "sample_fubini_study: dim < 1");
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    ComplexVector g(dim);
    for (int i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i) = Complex(re, im);
    }
    if (g.norm() > 1e-100) return ProjectivePoint::from_vector(g);
  }
}

}  // namespace qtraj
