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

#include "qtraj/kraus.hpp"
#include "qtraj/purification.hpp"

namespace qtraj {
namespace {

TEST(PurWords, UnitaryModelIsViolatedWithIdentityWitness) {
  const auto r = check_pur_words(builtin_model("appc_example2"), 4);
  EXPECT_EQ(r.verdict, PurVerdict::kViolated);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_LE((*r.witness - ComplexMatrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(PurWords, CertifiedAtLengthOne) {
  for (const auto& m : {builtin_model("amplitude_damping", {{"p", 0.3}}),
                        builtin_model("flip_flop"), builtin_model("rotating_damping")}) {
    const auto r = check_pur_words(m, 4);
    EXPECT_EQ(r.verdict, PurVerdict::kHoldsCertified) << m.name();
    EXPECT_EQ(r.word_length_checked, 1) << m.name();
  }
}

TEST(PurWords, BlockScalarWitnessInDimensionThree) {
  // v*v acts as a scalar on span{e1, e2}: a rank-two witness exists.
  ComplexMatrix v0 = ComplexMatrix::Zero(3, 3);
  v0(0, 0) = std::sqrt(0.5);
  v0(1, 1) = std::sqrt(0.5);
  v0(2, 2) = std::sqrt(0.2);
  ComplexMatrix v1 = ComplexMatrix::Zero(3, 3);
  v1(1, 0) = std::sqrt(0.5);
  v1(0, 1) = std::sqrt(0.5);
  v1(2, 2) = std::sqrt(0.8);
  const KrausMeasure m({{1.0, v0}, {1.0, v1}});
  const auto r = check_pur_words(m, 3);
  ASSERT_EQ(r.verdict, PurVerdict::kViolated);
  const ComplexMatrix& p = *r.witness;
  EXPECT_NEAR(p.trace().real(), 2.0, 1e-9);
  // The witness compresses every enumerated v_w* v_w to a scalar.
  for (const auto& e : m.elements()) {
    const ComplexMatrix g = e.matrix.adjoint() * e.matrix;
    const ComplexMatrix c = p * g * p;
    const Complex lambda = c.trace() / p.trace();
    EXPECT_LE((c - lambda * p).norm(), 1e-8 * g.norm());
  }
}

TEST(PurWords, GenericDimensionThreeHolds) {
  Rng rng(4);
  std::normal_distribution<double> g;
  ComplexMatrix a(3, 3);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a(r, c) = Complex(g(rng), g(rng));
  }
  // Complete {a} into a stochastic pair through the square root of Id - a*a.
  a /= 1.01 * a.norm();
  const ComplexMatrix rest = numerics::psd_sqrt(ComplexMatrix::Identity(3, 3) - a.adjoint() * a);
  const KrausMeasure m({{1.0, a}, {1.0, rest}});
  // rest is a function of a*a, so length one only gives a span of dimension 2.
  EXPECT_EQ(check_pur_words(m, 1).verdict, PurVerdict::kInconclusive);
  const auto r = check_pur_words(m, 6);
  EXPECT_EQ(r.verdict, PurVerdict::kHoldsCertified);
  EXPECT_LT(r.word_length_checked, 6);
}

TEST(PurMonteCarlo, UnitaryPlateau) {
  const auto r = check_pur_montecarlo(builtin_model("appc_example2"), 20, 20, 1);
  EXPECT_NE(r.verdict, PurVerdict::kHoldsLikely);
  for (const auto& pt : r.mc_statistics) EXPECT_NEAR(pt.median_lambda2, 0.5, 1e-12);
}

TEST(PurMonteCarlo, AmplitudeDampingDecays) {
  const auto r = check_pur_montecarlo(builtin_model("amplitude_damping", {{"p", 0.3}}), 100, 100, 2);
  EXPECT_EQ(r.verdict, PurVerdict::kHoldsLikely) << r.detail;
  ASSERT_TRUE(r.mc_fit.has_value());
  EXPECT_LT(r.mc_fit->slope, 0.0);
}

TEST(PurMonteCarlo, ThreadCountDoesNotChangeStatistics) {
  const auto m = builtin_model("rotating_damping");
  const auto a = check_pur_montecarlo(m, 30, 40, 9, 1e-6, 1);
  const auto b = check_pur_montecarlo(m, 30, 40, 9, 1e-6, 4);
  ASSERT_EQ(a.mc_statistics.size(), b.mc_statistics.size());
  for (std::size_t i = 0; i < a.mc_statistics.size(); ++i) {
    EXPECT_EQ(a.mc_statistics[i].median_lambda2, b.mc_statistics[i].median_lambda2);
  }
}

TEST(Contractivity, UnitaryRatioIsOne) {
  const auto r = contractivity_diagnostic(builtin_model("appc_example2"), 10, 10, 1);
  for (double x : r.ratio_samples) EXPECT_NEAR(x, 1.0, 1e-12);
}

TEST(Contractivity, FlipFlopRatioVanishes) {
  const auto r = contractivity_diagnostic(builtin_model("flip_flop"), 1, 10, 1);
  for (double x : r.ratio_samples) EXPECT_EQ(x, 0.0);
}

TEST(Contractivity, RotatingDampingContracts) {
  // The ratio shrinks by roughly exp(-0.063) per step for the default
  // parameters, so about 220 steps are needed to pass 1e-6.
  const auto r = contractivity_diagnostic(builtin_model("rotating_damping"), 300, 100, 3);
  EXPECT_LT(r.median_ratio, 1e-6);
}

}  // namespace
}  // namespace qtraj
