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

#include "qtraj/channel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtraj/error.hpp"
#include "qtraj/random.hpp"

namespace qtraj {
namespace {

constexpr double kDensityTolerance = 1e-10;
constexpr double kNullSpaceThreshold = 1e-8;
constexpr double kRhoResidualTolerance = 1e-8;
constexpr double kCesaroTolerance = 1e-9;
constexpr int kCesaroMaxDoublings = 64;

// Real orthonormal basis of Hermitian k x k matrices (Frobenius inner product).
std::vector<ComplexMatrix> hermitian_basis(int k) {
  std::vector<ComplexMatrix> basis;
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < k; ++i) {
    ComplexMatrix e = ComplexMatrix::Zero(k, k);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      ComplexMatrix sym = ComplexMatrix::Zero(k, k);
      sym(i, j) = s;
      sym(j, i) = s;
      basis.push_back(sym);
      ComplexMatrix anti = ComplexMatrix::Zero(k, k);
      anti(i, j) = Complex(0.0, -s);
      anti(j, i) = Complex(0.0, s);
      basis.push_back(anti);
    }
  }
  return basis;
}

struct CesaroProjector {
  ComplexMatrix projector;
  double residual = 0.0;
};

// Cesaro mean (1/N) sum_{n<N} S^n with N = 2^j via A_{2N} = (A_N + S^N A_N)/2,
// iterated until consecutive means agree to kCesaroTolerance.
//
// Repeated squaring amplifies rounding on the eigenvalue-1 direction like
// (1 + eps)^(2^j), so every power is pulled back onto the trace-preserving
// affine set <vec(Id)| S^N = <vec(Id)|.
CesaroProjector cesaro_projector(const ComplexMatrix& s, int dim) {
  const Eigen::Index n = s.rows();
  const ComplexVector id = vectorize(ComplexMatrix::Identity(dim, dim));
  const auto restore_trace = [&](ComplexMatrix& a) {
    const ComplexVector defect = a.adjoint() * id - id;  // conj of <Id| a - <Id|
    a -= id * defect.adjoint() / static_cast<double>(dim);
  };
  ComplexMatrix mean = ComplexMatrix::Identity(n, n);
  ComplexMatrix power = s;
  restore_trace(power);
  double residual = 0.0;
  for (int it = 0; it < kCesaroMaxDoublings; ++it) {
    ComplexMatrix next = 0.5 * (mean + power * mean);
    residual = (next - mean).norm();
    mean = std::move(next);
    power = power * power;
    restore_trace(power);
    if (residual < kCesaroTolerance && it >= 4) return {mean, residual};
  }
  std::ostringstream msg;
  msg << "Cesaro averaging did not stabilize after " << kCesaroMaxDoublings
      << " doublings (residual " << residual << ")";
  throw Error(ErrorKind::kNumericalFailure, msg.str());
}

int numerical_rank(const ComplexMatrix& a, double threshold) {
  const RealVector s = Eigen::JacobiSVD<ComplexMatrix>(a).singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) rank += s(i) > threshold ? 1 : 0;
  return rank;
}

// Extremal invariant states from a full-support invariant state rho_star on
// L and a generic Hermitian fixed point X. On L, rho_star^{-1/2} X
// rho_star^{-1/2} lies in the commutant structure of the fixed points; the
// spectral projectors Q_c of that element give extremal states
// rho_star^{1/2} Q_c rho_star^{1/2}.
void extremal_decomposition(const KrausMeasure& m, const ComplexMatrix& rho_star,
                            const ComplexMatrix& generic, PhiErgReport& report) {
  const ComplexMatrix l_basis = numerics::psd_range(rho_star, 1e-9);
  const Eigen::Index r = l_basis.cols();
  const ComplexMatrix rho_l = numerics::hermitian_part(l_basis.adjoint() * rho_star * l_basis);
  const ComplexMatrix x_l = numerics::hermitian_part(l_basis.adjoint() * generic * l_basis);
  const ComplexMatrix inv_sqrt = numerics::pd_inverse_sqrt(rho_l);
  const ComplexMatrix sqrt_l = numerics::psd_sqrt(rho_l);
  const ComplexMatrix y = numerics::hermitian_part(inv_sqrt * x_l * inv_sqrt);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(y);
  const RealVector& ev = solver.eigenvalues();
  const double spread = std::max(1.0, ev.cwiseAbs().maxCoeff());
  Eigen::Index start = 0;
  while (start < r) {
    Eigen::Index end = start + 1;
    while (end < r && ev(end) - ev(end - 1) <= 1e-6 * spread) ++end;
    const ComplexMatrix q = solver.eigenvectors().middleCols(start, end - start);
    ComplexMatrix state = sqrt_l * q * q.adjoint() * sqrt_l;
    state = l_basis * state * l_basis.adjoint();
    state = numerics::hermitian_part(state / state.trace().real());
    report.extremal_states.push_back(state);
    report.extremal_supports.push_back(numerics::psd_range(state, 1e-9));
    start = end;
  }
  (void)m;
}

}  // namespace

DensityMatrix::DensityMatrix(const ComplexMatrix& m) : matrix_(m) {
  if (m.rows() != m.cols() || m.rows() == 0 || !numerics::all_finite(m)) {
    throw Error(ErrorKind::kInvalidInput, "density matrix must be square and finite");
  }
  if ((m - m.adjoint()).norm() > kDensityTolerance) {
    throw Error(ErrorKind::kInvalidInput, "density matrix is not Hermitian");
  }
  if (std::abs(m.trace() - Complex(1.0, 0.0)) > kDensityTolerance) {
    throw Error(ErrorKind::kInvalidInput, "density matrix does not have unit trace");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(numerics::hermitian_part(m),
                                                      Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kDensityTolerance) {
    throw Error(ErrorKind::kInvalidInput, "density matrix is not positive semidefinite");
  }
}

DensityMatrix DensityMatrix::project(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(numerics::hermitian_part(m));
  const RealVector clipped = solver.eigenvalues().cwiseMax(0.0);
  const double total = clipped.sum();
  if (!(total > 0.0)) {
    throw Error(ErrorKind::kNumericalFailure, "cannot project a non-positive matrix to a state");
  }
  ComplexMatrix rho = solver.eigenvectors() * (clipped / total).cast<Complex>().asDiagonal() *
                      solver.eigenvectors().adjoint();
  return DensityMatrix(numerics::hermitian_part(rho), Unchecked{});
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim),
                       Unchecked{});
}

DensityMatrix DensityMatrix::pure(const ProjectivePoint& x) {
  return DensityMatrix(x.projector(), Unchecked{});
}

ComplexVector vectorize(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvectorize(const ComplexVector& v, int dim) {
  return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

SuperOperator build_superoperator(const KrausMeasure& m) {
  m.require_stochastic();
  const int k = m.dim();
  SuperOperator s{ComplexMatrix::Zero(k * k, k * k), k};
  for (const auto& e : m.elements()) {
    if (e.weight == 0.0) continue;
    const ComplexMatrix conj = e.matrix.conjugate();
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        s.matrix.block(a * k, b * k, k, k) += e.weight * conj(a, b) * e.matrix;
      }
    }
  }
  return s;
}

ComplexMatrix apply_channel_matrix(const KrausMeasure& m, const ComplexMatrix& x) {
  ComplexMatrix out = ComplexMatrix::Zero(m.dim(), m.dim());
  for (const auto& e : m.elements()) {
    out += e.weight * (e.matrix * x * e.matrix.adjoint());
  }
  return out;
}

DensityMatrix apply_channel(const KrausMeasure& m, const DensityMatrix& rho) {
  m.require_stochastic();
  if (rho.dim() != m.dim()) {
    throw Error(ErrorKind::kInvalidInput, "apply_channel: dimension mismatch");
  }
  return DensityMatrix::project(apply_channel_matrix(m, rho.matrix()));
}

ComplexMatrix cesaro_iterate(const KrausMeasure& m, const ComplexMatrix& rho, int period,
                             int n) {
  ComplexMatrix current = rho;
  for (int t = 0; t < period * n; ++t) current = apply_channel_matrix(m, current);
  ComplexMatrix sum = ComplexMatrix::Zero(m.dim(), m.dim());
  for (int r = 0; r < period; ++r) {
    sum += current;
    current = apply_channel_matrix(m, current);
  }
  return sum / static_cast<double>(period);
}

PhiErgReport check_phi_erg(const KrausMeasure& m) {
  const SuperOperator s = build_superoperator(m);
  const int k = m.dim();
  const Eigen::Index n2 = static_cast<Eigen::Index>(k) * k;
  PhiErgReport report;

  const ComplexMatrix shifted = s.matrix - ComplexMatrix::Identity(n2, n2);
  report.fixed_point_dimension =
      static_cast<int>(numerics::null_space(shifted, kNullSpaceThreshold).cols());

  const CesaroProjector cesaro = cesaro_projector(s.matrix, k);
  report.cesaro_residual = cesaro.residual;
  report.cesaro_fixed_point_dimension = numerical_rank(cesaro.projector, 0.5);
  if (report.cesaro_fixed_point_dimension != report.fixed_point_dimension) {
    std::ostringstream msg;
    msg << "fixed-point dimension estimates disagree: null space gives "
        << report.fixed_point_dimension << ", Cesaro projector gives "
        << report.cesaro_fixed_point_dimension;
    throw Error(ErrorKind::kNumericalFailure, msg.str());
  }

  const auto apply_projector = [&](const ComplexMatrix& x) {
    return unvectorize(cesaro.projector * vectorize(x), k);
  };
  const ComplexMatrix rho_star = numerics::hermitian_part(
      apply_projector(ComplexMatrix::Identity(k, k) / static_cast<double>(k)));

  // Fixed seed: the decomposition must be reproducible.
  Rng rng(0x5EEDF1C5ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix generic = ComplexMatrix::Zero(k, k);
  for (const auto& b : hermitian_basis(k)) generic += normal(rng) * apply_projector(b);
  generic = numerics::hermitian_part(generic);
  extremal_decomposition(m, rho_star, generic, report);

  report.holds = report.fixed_point_dimension == 1;
  if (report.holds) {
    report.invariant_subspace_E = report.extremal_supports.front();
    report.E_is_full = report.invariant_subspace_E.cols() == k;
  }
  return report;
}

SpectralReport analyze(const KrausMeasure& m, double peripheral_tol) {
  const SuperOperator s = build_superoperator(m);
  const int k = m.dim();
  const Eigen::Index n2 = static_cast<Eigen::Index>(k) * k;

  const ComplexMatrix shifted = s.matrix - ComplexMatrix::Identity(n2, n2);
  const int d = static_cast<int>(numerics::null_space(shifted, kNullSpaceThreshold).cols());
  if (d > 1) {
    throw MultipleFixedPointsError(
        d, "(phi-Erg) fails: fixed-point space has dimension " + std::to_string(d));
  }

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(s.matrix, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kNumericalFailure, "superoperator eigensolver did not converge");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n2));
  for (Eigen::Index i = 0; i < n2; ++i) order[static_cast<std::size_t>(i)] = i;
  const auto& values = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(values(a)) > std::abs(values(b));
  });

  SpectralReport report;
  report.fixed_point_dimension = d;
  for (const auto i : order) report.eigenvalues.push_back(values(i));

  Eigen::Index nearest_one = order.front();
  for (const auto i : order) {
    if (std::abs(values(i) - 1.0) < std::abs(values(nearest_one) - 1.0)) nearest_one = i;
  }
  if (std::abs(values(nearest_one) - 1.0) > 1e-6) {
    throw Error(ErrorKind::kNumericalFailure, "superoperator has no eigenvalue near 1");
  }

  report.period_m = 0;
  report.gap_lambda = 0.0;
  for (const auto& z : report.eigenvalues) {
    if (std::abs(z) >= 1.0 - peripheral_tol) {
      ++report.period_m;
    } else {
      report.gap_lambda = std::max(report.gap_lambda, std::abs(z));
    }
  }

  ComplexMatrix x = unvectorize(solver.eigenvectors().col(nearest_one), k);
  const Complex tr = x.trace();
  if (std::abs(tr) < 1e-12) {
    throw Error(ErrorKind::kNumericalFailure, "fixed eigenvector has vanishing trace");
  }
  x /= tr;
  const DensityMatrix rho = DensityMatrix::project(x);
  report.rho_inv = rho.matrix();
  report.rho_inv_residual =
      numerics::trace_norm(apply_channel_matrix(m, report.rho_inv) - report.rho_inv);
  if (report.rho_inv_residual > kRhoResidualTolerance) {
    std::ostringstream msg;
    msg << "invariant state residual " << report.rho_inv_residual << " exceeds "
        << kRhoResidualTolerance;
    throw Error(ErrorKind::kNumericalFailure, msg.str());
  }
  report.invariant_subspace_E = numerics::psd_range(report.rho_inv, 1e-9);
  report.E_is_full = report.invariant_subspace_E.cols() == k;
  return report;
}

nlohmann::json to_json(const SpectralReport& report) {
  const auto matrix_json = [](const ComplexMatrix& a) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < a.cols(); ++c) {
        row.push_back({a(r, c).real(), a(r, c).imag()});
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };
  nlohmann::json j;
  nlohmann::json eig = nlohmann::json::array();
  for (const auto& z : report.eigenvalues) eig.push_back({z.real(), z.imag()});
  j["eigenvalues"] = std::move(eig);
  j["m"] = report.period_m;
  j["lambda"] = report.gap_lambda;
  j["rho_inv"] = matrix_json(report.rho_inv);
  j["rho_inv_residual"] = report.rho_inv_residual;
  nlohmann::json basis = nlohmann::json::array();
  for (Eigen::Index c = 0; c < report.invariant_subspace_E.cols(); ++c) {
    nlohmann::json v = nlohmann::json::array();
    for (Eigen::Index r = 0; r < report.invariant_subspace_E.rows(); ++r) {
      const Complex z = report.invariant_subspace_E(r, c);
      v.push_back({z.real(), z.imag()});
    }
    basis.push_back(std::move(v));
  }
  j["E"] = std::move(basis);
  j["E_is_full"] = report.E_is_full;
  j["fixed_point_dimension"] = report.fixed_point_dimension;
  return j;
}

}  // namespace qtraj
