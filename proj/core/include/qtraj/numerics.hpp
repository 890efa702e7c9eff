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

#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace qtraj {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace numerics {

inline constexpr double kDecompositionTolerance = 1e-10;

// Singular values are floored here before logarithms are taken, so that rank
// deficiency shows up as a very negative but finite number.
inline constexpr double kSingularValueFloor = 1e-300;

struct SvdResult {
  ComplexMatrix left_vectors;
  RealVector singular_values;  // non-increasing
  ComplexMatrix right_vectors;
};

struct PolarResult {
  ComplexMatrix unitary;
  ComplexMatrix positive;
};

struct HermitianEigen {
  RealVector eigenvalues;  // ascending
  ComplexMatrix eigenvectors;
};

bool all_finite(const ComplexMatrix& a);

// Full SVD of a square matrix. Each right singular vector carries the phase
// convention (first non-negligible component real positive) and the matching
// left vector is rotated with it, so A = U diag(a) V* still holds.
SvdResult svd(const ComplexMatrix& a);

// Singular values only, non-increasing.
RealVector singular_values(const ComplexMatrix& a);

double operator_norm(const ComplexMatrix& a);

// A = U P with P = (A*A)^(1/2). For singular A the unitary factor is the
// canonical completion U = U_svd V_svd*.
PolarResult polar(const ComplexMatrix& a);

std::pair<double, double> top_two_singular_values(const ComplexMatrix& a);

HermitianEigen herm_eig(const ComplexMatrix& h);

// Unit phase c such that c*v satisfies the phase convention below.
Complex convention_phase(const ComplexVector& v, double threshold = 1e-12);

// Multiplies v by a unit phase so that its first component with modulus above
// `threshold * max|v_i|` is real and positive.
void apply_phase_convention(Eigen::Ref<ComplexVector> v, double threshold = 1e-12);

ComplexMatrix hermitian_part(const ComplexMatrix& a);

// tr|X| for Hermitian X (sum of absolute eigenvalues); for general X, the sum
// of singular values.
double trace_norm(const ComplexMatrix& x);

// Orthonormal basis of the numerical null space (singular values below
// `threshold`) of a (possibly rectangular) matrix. Columns are the corresponding right
// singular vectors.
ComplexMatrix null_space(const ComplexMatrix& a, double threshold);

// Orthonormal basis of the range of a PSD matrix: eigenvectors whose
// eigenvalue exceeds `relative_threshold * lambda_max`.
ComplexMatrix psd_range(const ComplexMatrix& p, double relative_threshold);

// Square root and inverse square root of a positive definite Hermitian matrix.
ComplexMatrix psd_sqrt(const ComplexMatrix& p);
ComplexMatrix pd_inverse_sqrt(const ComplexMatrix& p);

}  // namespace numerics
}  // namespace qtraj
