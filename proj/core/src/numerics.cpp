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

#include "qtraj/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qtraj/error.hpp"

namespace qtraj {
namespace numerics {
namespace {

void require_square(const ComplexMatrix& a, const char* op) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorKind::kInvalidInput,
                std::string(op) + ": expected a non-empty square matrix, got " +
                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  if (!all_finite(a)) {
    throw Error(ErrorKind::kInvalidInput, std::string(op) + ": non-finite entry");
  }
}

Eigen::JacobiSVD<ComplexMatrix> jacobi(const ComplexMatrix& a, bool vectors) {
  const int options = vectors ? (Eigen::ComputeFullU | Eigen::ComputeFullV) : 0;
  return Eigen::JacobiSVD<ComplexMatrix>(a, options);
}

}  // namespace

bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const Complex z = a(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  }
  return true;
}

Complex convention_phase(const ComplexVector& v, double threshold) {
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return Complex(1.0, 0.0);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double r = std::abs(v(i));
    if (r > threshold * scale) return std::conj(v(i)) / r;
  }
  return Complex(1.0, 0.0);
}

void apply_phase_convention(Eigen::Ref<ComplexVector> v, double threshold) {
  const Complex phase = convention_phase(v, threshold);
  v *= phase;
  // Remove the rounding residue of the imaginary part on the pivot.
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > threshold * scale) {
      v(i) = Complex(std::abs(v(i)), 0.0);
      return;
    }
  }
}

SvdResult svd(const ComplexMatrix& a) {
  require_square(a, "svd");
  const auto dec = jacobi(a, true);
  SvdResult out{dec.matrixU(), dec.singularValues(), dec.matrixV()};
  for (Eigen::Index j = 0; j < out.right_vectors.cols(); ++j) {
    const Complex phase = convention_phase(out.right_vectors.col(j), 1e-12);
    out.right_vectors.col(j) *= phase;
    out.left_vectors.col(j) *= phase;
  }
  return out;
}

RealVector singular_values(const ComplexMatrix& a) {
  require_square(a, "singular_values");
  return jacobi(a, false).singularValues();
}

double operator_norm(const ComplexMatrix& a) { return singular_values(a)(0); }

PolarResult polar(const ComplexMatrix& a) {
  require_square(a, "polar");
  const SvdResult s = svd(a);
  PolarResult out;
  out.unitary = s.left_vectors * s.right_vectors.adjoint();
  out.positive = s.right_vectors * s.singular_values.cast<Complex>().asDiagonal() *
                 s.right_vectors.adjoint();
  out.positive = hermitian_part(out.positive);
  return out;
}

std::pair<double, double> top_two_singular_values(const ComplexMatrix& a) {
  if (a.rows() < 2) {
    throw Error(ErrorKind::kInvalidInput,
                "top_two_singular_values: dimension must be at least 2");
  }
  const RealVector s = singular_values(a);
  return {s(0), s(1)};
}

HermitianEigen herm_eig(const ComplexMatrix& h) {
  require_square(h, "herm_eig");
  const double norm = h.norm();
  if ((h - h.adjoint()).norm() > kDecompositionTolerance * std::max(norm, 1e-300)) {
    throw Error(ErrorKind::kInvalidInput, "herm_eig: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(h));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kNumericalFailure, "herm_eig: eigensolver did not converge");
  }
  HermitianEigen out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index j = 0; j < out.eigenvectors.cols(); ++j) {
    apply_phase_convention(out.eigenvectors.col(j));
  }
  return out;
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  return 0.5 * (a + a.adjoint());
}

double trace_norm(const ComplexMatrix& x) {
  if (x.rows() == x.cols() && (x - x.adjoint()).norm() <= 1e-14 * (1.0 + x.norm())) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(x),
                                                        Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().sum();
  }
  return jacobi(x, false).singularValues().sum();
}

ComplexMatrix null_space(const ComplexMatrix& a, double threshold) {
  if (a.size() == 0 || !all_finite(a)) {
    throw Error(ErrorKind::kInvalidInput, "null_space: expected a non-empty finite matrix");
  }
  const auto dec = jacobi(a, true);
  const RealVector& s = dec.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > threshold) ++rank;
  return dec.matrixV().rightCols(a.cols() - rank);
}

ComplexMatrix psd_range(const ComplexMatrix& p, double relative_threshold) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(p));
  const RealVector& ev = solver.eigenvalues();
  const double top = ev.maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = ev.size(); i-- > 0;) {
    if (top > 0.0 && ev(i) > relative_threshold * top) keep.push_back(i);
  }
  ComplexMatrix basis(p.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    ComplexVector v = solver.eigenvectors().col(keep[c]);
    apply_phase_convention(v);
    basis.col(static_cast<Eigen::Index>(c)) = v;
  }
  return basis;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& p) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(p));
  const RealVector root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * root.cast<Complex>().asDiagonal() *
         solver.eigenvectors().adjoint();
}

ComplexMatrix pd_inverse_sqrt(const ComplexMatrix& p) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(p));
  const RealVector& ev = solver.eigenvalues();
  if (ev.minCoeff() <= 0.0) {
    throw Error(ErrorKind::kNumericalFailure,
                "pd_inverse_sqrt: matrix is not positive definite");
  }
  const RealVector inv_root = ev.cwiseSqrt().cwiseInverse();
  return solver.eigenvectors() * inv_root.cast<Complex>().asDiagonal() *
         solver.eigenvectors().adjoint();
}

}  // namespace numerics
}  // namespace qtraj
