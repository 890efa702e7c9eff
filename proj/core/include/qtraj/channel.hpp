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

#include <nlohmann/json.hpp>

#include "qtraj/kraus.hpp"
#include "qtraj/numerics.hpp"

namespace qtraj {

inline constexpr double kDefaultPeripheralTolerance = 1e-9;

// Hermitian, positive semidefinite, unit trace (all within 1e-10).
class DensityMatrix {
 public:
  // Validates; throws invalid-input when the invariants fail.
  explicit DensityMatrix(const ComplexMatrix& m);

  // Hermitizes, clips negative eigenvalues and renormalizes the trace.
  static DensityMatrix project(const ComplexMatrix& m);

  static DensityMatrix maximally_mixed(int dim);
  static DensityMatrix pure(const ProjectivePoint& x);

  const ComplexMatrix& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

 private:
  struct Unchecked {};
  DensityMatrix(const ComplexMatrix& m, Unchecked) : matrix_(m) {}
  ComplexMatrix matrix_;
};

// k^2 x k^2 matrix of phi on column-stacked density matrices:
// vec(v rho v*) = (conj(v) kron v) vec(rho).
struct SuperOperator {
  ComplexMatrix matrix;
  int dim = 0;
};

ComplexVector vectorize(const ComplexMatrix& m);
ComplexMatrix unvectorize(const ComplexVector& v, int dim);

SuperOperator build_superoperator(const KrausMeasure& m);

// phi(rho) = sum_i w_i v_i rho v_i*, for arbitrary (not necessarily PSD) X.
ComplexMatrix apply_channel_matrix(const KrausMeasure& m, const ComplexMatrix& x);
DensityMatrix apply_channel(const KrausMeasure& m, const DensityMatrix& rho);

struct PhiErgReport {
  bool holds = false;
  int fixed_point_dimension = 0;        // null space of (S - Id), threshold 1e-8
  int cesaro_fixed_point_dimension = 0; // rank of the Cesaro projector
  double cesaro_residual = 0.0;
  ComplexMatrix invariant_subspace_E;   // orthonormal columns (valid when holds)
  bool E_is_full = false;
  // Supports of the extremal invariant states (columns orthonormal).
  std::vector<ComplexMatrix> extremal_supports;
  std::vector<ComplexMatrix> extremal_states;
};

PhiErgReport check_phi_erg(const KrausMeasure& m);

struct SpectralReport {
  std::vector<Complex> eigenvalues;  // modulus descending
  int period_m = 1;
  double gap_lambda = 0.0;
  ComplexMatrix rho_inv;
  double rho_inv_residual = 0.0;     // ||phi(rho_inv) - rho_inv||_1
  ComplexMatrix invariant_subspace_E;
  bool E_is_full = false;
  int fixed_point_dimension = 1;
};

// Throws MultipleFixedPointsError when the fixed-point space has dimension
// d > 1, numerical-failure when no eigenvalue is near 1 or rho_inv fails its
// residual check.
SpectralReport analyze(const KrausMeasure& m,
                       double peripheral_tol = kDefaultPeripheralTolerance);

nlohmann::json to_json(const SpectralReport& report);

// Cesaro average (1/m) sum_{r<m} phi^{m n + r}(rho).
ComplexMatrix cesaro_iterate(const KrausMeasure& m, const ComplexMatrix& rho, int period,
                             int n);

}  // namespace qtraj
