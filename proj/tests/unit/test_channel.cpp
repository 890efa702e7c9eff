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

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qtraj/channel.hpp"
#include "qtraj/error.hpp"
#include "qtraj/kraus.hpp"

namespace qtraj {
namespace {

ComplexMatrix E(int r, int c) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(r, c) = 1.0;
  return m;
}

int oracle_dimension(const KrausMeasure& m) {
  std::vector<double> w;
  std::vector<ComplexMatrix> v;
  for (const auto& e : m.elements()) {
    w.push_back(e.weight);
    v.push_back(e.matrix);
  }
  return oracle::fixed_point_dimension(w, v);
}

// Sorted by (real, imag) so spectra can be compared entrywise.
std::vector<Complex> sorted(std::vector<Complex> v) {
  for (auto& z : v) {
    if (std::abs(z.imag()) < 1e-12) z = Complex(z.real(), 0.0);
  }
  std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return v;
}

TEST(DensityMatrix, Validation) {
  EXPECT_NO_THROW(DensityMatrix(ComplexMatrix::Identity(2, 2) / 2.0));
  EXPECT_THROW(DensityMatrix(ComplexMatrix::Identity(2, 2)), Error);
  EXPECT_THROW(DensityMatrix(E(0, 1)), Error);
}

TEST(Superoperator, IdentityModel) {
  const KrausMeasure m({{1.0, ComplexMatrix::Identity(2, 2)}});
  EXPECT_LE((build_superoperator(m).matrix - ComplexMatrix::Identity(4, 4)).norm(), 1e-15);
}

TEST(Superoperator, MatchesDirectApplication) {
  const auto m = builtin_model("rotating_damping");
  Rng rng(9);
  const auto s = build_superoperator(m);
  for (int t = 0; t < 10; ++t) {
    const ComplexMatrix rho = sample_fubini_study(2, rng).projector();
    const ComplexMatrix direct = apply_channel_matrix(m, rho);
    EXPECT_LE((unvectorize(s.matrix * vectorize(rho), 2) - direct).norm(), 1e-13);
    EXPECT_NEAR(direct.trace().real(), 1.0, 1e-12);
  }
}

TEST(ApplyChannel, HandValues) {
  const auto ex2 = builtin_model("appc_example2");
  EXPECT_LE((apply_channel_matrix(ex2, ComplexMatrix::Identity(2, 2) / 2.0) -
             ComplexMatrix::Identity(2, 2) / 2.0)
                .norm(),
            1e-15);
  const auto ad = builtin_model("amplitude_damping", {{"p", 0.3}});
  EXPECT_LE((apply_channel_matrix(ad, E(1, 1)) - (0.3 * E(0, 0) + 0.7 * E(1, 1))).norm(), 1e-15);
  EXPECT_LE((apply_channel_matrix(ad, E(0, 0)) - E(0, 0)).norm(), 1e-15);
  const auto ff = builtin_model("flip_flop");
  EXPECT_LE((apply_channel_matrix(ff, E(0, 0)) - E(1, 1)).norm(), 1e-15);
}

TEST(Analyze, FlipFlop) {
  const auto r = analyze(builtin_model("flip_flop"));
  const auto ev = sorted(r.eigenvalues);
  const std::vector<Complex> expected{-1.0, 0.0, 0.0, 1.0};
  for (int i = 0; i < 4; ++i) EXPECT_LE(std::abs(ev[i] - expected[i]), 1e-9);
  EXPECT_EQ(r.period_m, 2);
  EXPECT_NEAR(r.gap_lambda, 0.0, 1e-9);
  EXPECT_LE((r.rho_inv - ComplexMatrix::Identity(2, 2) / 2.0).norm(), 1e-9);
  EXPECT_TRUE(r.E_is_full);
}

TEST(Analyze, AmplitudeDamping) {
  const auto r = analyze(builtin_model("amplitude_damping", {{"p", 0.5}}));
  const auto ev = sorted(r.eigenvalues);
  const double s = std::sqrt(0.5);
  const std::vector<Complex> expected{0.5, s, s, 1.0};
  for (int i = 0; i < 4; ++i) EXPECT_LE(std::abs(ev[i] - expected[i]), 1e-9);
  EXPECT_EQ(r.period_m, 1);
  EXPECT_NEAR(r.gap_lambda, s, 1e-9);
  EXPECT_LE((r.rho_inv - E(0, 0)).norm(), 1e-9);
  EXPECT_FALSE(r.E_is_full);
  ASSERT_EQ(r.invariant_subspace_E.cols(), 1);
  EXPECT_NEAR(std::abs(r.invariant_subspace_E(0, 0)), 1.0, 1e-9);
}

TEST(Analyze, FixedPointDimensionAgreesWithOracle) {
  for (const auto& name : builtin_model_names()) {
    const auto m = builtin_model(name);
    const auto erg = check_phi_erg(m);
    EXPECT_EQ(erg.fixed_point_dimension, oracle_dimension(m)) << name;
  }
}

TEST(Analyze, SecondExampleHasUniqueFixedPoint) {
  const auto m = builtin_model("appc_example2");
  EXPECT_EQ(oracle_dimension(m), 1);
  const auto r = analyze(m);
  EXPECT_EQ(r.fixed_point_dimension, 1);
  EXPECT_LE((r.rho_inv - ComplexMatrix::Identity(2, 2) / 2.0).norm(), 1e-9);
  EXPECT_TRUE(r.E_is_full);
}

TEST(Analyze, IdentityModelHasManyFixedPoints) {
  const KrausMeasure m({{1.0, ComplexMatrix::Identity(2, 2)}});
  EXPECT_EQ(oracle_dimension(m), 4);
  try {
    analyze(m);
    FAIL() << "expected multiple fixed points";
  } catch (const MultipleFixedPointsError& e) {
    EXPECT_EQ(e.dimension(), 4);
  }
  EXPECT_FALSE(check_phi_erg(m).holds);
}

TEST(Analyze, InvariantStateProperties) {
  for (const auto& name : builtin_model_names()) {
    const auto m = builtin_model(name);
    const auto r = analyze(m);
    double top = 0.0;
    for (const auto& z : r.eigenvalues) top = std::max(top, std::abs(z));
    EXPECT_NEAR(top, 1.0, 1e-9) << name;
    EXPECT_LE((apply_channel_matrix(m, r.rho_inv) - r.rho_inv).norm(), 1e-9) << name;
    // Range of rho_inv equals E.
    const ComplexMatrix proj = r.invariant_subspace_E * r.invariant_subspace_E.adjoint();
    EXPECT_LE((proj * r.rho_inv - r.rho_inv).norm(), 1e-8) << name;
  }
}

TEST(PhiErg, AmplitudeDampingSubspace) {
  const auto r = check_phi_erg(builtin_model("amplitude_damping", {{"p", 0.5}}));
  EXPECT_TRUE(r.holds);
  EXPECT_FALSE(r.E_is_full);
  EXPECT_EQ(r.fixed_point_dimension, 1);
}

TEST(PhiErg, ExtremalSupportsForDirectSum) {
  // Two decoupled unitary blocks: fixed points are span{P_1, P_2}.
  ComplexMatrix u = ComplexMatrix::Identity(3, 3);
  u(0, 0) = Complex(0, 1);
  const KrausMeasure m({{1.0, u}});
  const auto r = check_phi_erg(m);
  EXPECT_FALSE(r.holds);
  EXPECT_EQ(r.fixed_point_dimension, oracle_dimension(m));
  EXPECT_GE(r.extremal_supports.size(), 2u);
}

TEST(PhiErg, CyclicShiftHasCirculantFixedPoints) {
  // X -> S X S* for the 3-cycle S fixes exactly the circulant matrices.
  ComplexMatrix shift = ComplexMatrix::Zero(3, 3);
  shift(1, 0) = shift(2, 1) = shift(0, 2) = 1.0;
  const KrausMeasure m({{1.0, shift}});
  EXPECT_EQ(oracle_dimension(m), 3);
  const auto r = check_phi_erg(m);
  EXPECT_EQ(r.fixed_point_dimension, 3);
  EXPECT_FALSE(r.holds);
}

TEST(Cesaro, FlipFlopAverageIsMaximallyMixed) {
  const auto ff = builtin_model("flip_flop");
  const ComplexMatrix avg = cesaro_iterate(ff, E(0, 0), 2, 5);
  EXPECT_LE((avg - ComplexMatrix::Identity(2, 2) / 2.0).norm(), 1e-14);
}

}  // namespace
}  // namespace qtraj
