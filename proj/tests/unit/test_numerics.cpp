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

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qtraj/error.hpp"
#include "qtraj/numerics.hpp"
#include "qtraj/random.hpp"

namespace qtraj {
namespace {

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

ComplexMatrix random_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix a(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) a(r, c) = Complex(g(rng), g(rng));
  }
  return a;
}

TEST(Svd, IdentityHasUnitSingularValues) {
  const auto r = numerics::svd(ComplexMatrix::Identity(2, 2));
  EXPECT_NEAR(r.singular_values(0), 1.0, 1e-14);
  EXPECT_NEAR(r.singular_values(1), 1.0, 1e-14);
}

TEST(Svd, DiagonalRankDeficient) {
  const auto r = numerics::svd(mat2(2.0, 0.0, 0.0, 0.0));
  EXPECT_NEAR(r.singular_values(0), 2.0, 1e-14);
  EXPECT_NEAR(r.singular_values(1), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(r.right_vectors(0, 0)), 1.0, 1e-14);
}

TEST(Svd, DampingOperator) {
  const auto r = numerics::svd(mat2(1.0, 0.0, 0.0, std::sqrt(0.5)));
  EXPECT_NEAR(r.singular_values(0), 1.0, 1e-14);
  EXPECT_NEAR(r.singular_values(1), std::sqrt(0.5), 1e-14);
}

TEST(Svd, ReconstructsRandomMatrices) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + trial % 4;
    const ComplexMatrix a = random_matrix(k, k, rng);
    const auto r = numerics::svd(a);
    const ComplexMatrix back =
        r.left_vectors * r.singular_values.cast<Complex>().asDiagonal() *
        r.right_vectors.adjoint();
    EXPECT_LE((a - back).norm(), 1e-10 * std::max(1.0, a.norm()));
    for (int i = 1; i < k; ++i) EXPECT_GE(r.singular_values(i - 1), r.singular_values(i));
    if (k == 2) {
      const auto [s1, s2] = oracle::singular_values_2x2(a);
      EXPECT_NEAR(r.singular_values(0), s1, 1e-10);
      EXPECT_NEAR(r.singular_values(1), s2, 1e-10);
    }
  }
}

TEST(Svd, RejectsNonFinite) {
  ComplexMatrix a = ComplexMatrix::Identity(2, 2);
  a(0, 1) = std::nan("");
  EXPECT_THROW(numerics::svd(a), Error);
}

TEST(Polar, UnitaryInput) {
  const ComplexMatrix u = mat2(0.0, Complex(0, 1), Complex(0, 1), 0.0);
  const auto p = numerics::polar(u);
  EXPECT_LE((p.unitary - u).norm(), 1e-12);
  EXPECT_LE((p.positive - ComplexMatrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(Polar, PositiveInput) {
  const ComplexMatrix a = mat2(2.0, 0.0, 0.0, 3.0);
  const auto p = numerics::polar(a);
  EXPECT_LE((p.unitary - ComplexMatrix::Identity(2, 2)).norm(), 1e-12);
  EXPECT_LE((p.positive - a).norm(), 1e-12);
}

TEST(Polar, NilpotentIsCompletedUnitarily) {
  const ComplexMatrix a = mat2(0.0, 1.0, 0.0, 0.0);
  const auto p = numerics::polar(a);
  EXPECT_LE((p.positive - mat2(0.0, 0.0, 0.0, 1.0)).norm(), 1e-12);
  EXPECT_LE((p.unitary * p.positive - a).norm(), 1e-12);
  EXPECT_LE((p.unitary.adjoint() * p.unitary - ComplexMatrix::Identity(2, 2)).norm(), 1e-12);
  EXPECT_NEAR(std::abs(p.unitary(0, 1)), 1.0, 1e-12);
}

TEST(TopTwo, Cases) {
  auto [a1, a2] = numerics::top_two_singular_values(ComplexMatrix::Identity(2, 2));
  EXPECT_NEAR(a1 * a2, 1.0, 1e-14);
  std::tie(a1, a2) = numerics::top_two_singular_values(mat2(1.0, 2.0, 2.0, 4.0));
  EXPECT_NEAR(a2, 0.0, 1e-12);
  std::tie(a1, a2) = numerics::top_two_singular_values(mat2(1.0, 1.0, 0.0, 1.0));
  EXPECT_NEAR(a1 * a2, 1.0, 1e-12);
}

TEST(HermEig, Cases) {
  auto e = numerics::herm_eig(ComplexMatrix::Identity(2, 2));
  EXPECT_NEAR(e.eigenvalues(0), 1.0, 1e-14);
  e = numerics::herm_eig(mat2(1.0, 0.0, 0.0, -1.0));
  EXPECT_NEAR(e.eigenvalues(0), -1.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues(1), 1.0, 1e-14);
  e = numerics::herm_eig(mat2(0.5, 0.5, 0.5, 0.5));
  EXPECT_NEAR(e.eigenvalues(0), 0.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues(1), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(e.eigenvectors(0, 1)), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(std::abs(e.eigenvectors(1, 1)), std::sqrt(0.5), 1e-12);
}

TEST(HermEig, RejectsNonHermitian) {
  EXPECT_THROW(numerics::herm_eig(mat2(1.0, 1.0, 0.0, 1.0)), Error);
}

TEST(NullSpace, MatchesRankOracle) {
  Rng rng(3);
  const ComplexMatrix b = random_matrix(4, 2, rng);
  const ComplexMatrix a = b * random_matrix(2, 4, rng);  // rank 2
  const ComplexMatrix n = numerics::null_space(a, 1e-9);
  EXPECT_EQ(n.cols(), 2);
  EXPECT_LE((a * n).norm(), 1e-9);
}

TEST(TraceNorm, SumOfAbsoluteEigenvalues) {
  EXPECT_NEAR(numerics::trace_norm(mat2(1.0, 0.0, 0.0, -2.0)), 3.0, 1e-14);
}

}  // namespace
}  // namespace qtraj
