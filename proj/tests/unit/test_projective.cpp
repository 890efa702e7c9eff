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

#include "qtraj/error.hpp"
#include "qtraj/projective.hpp"

namespace qtraj {
namespace {

ComplexVector vec2(Complex a, Complex b) {
  ComplexVector v(2);
  v << a, b;
  return v;
}

TEST(ProjectivePoint, PhaseConvention) {
  const auto x = ProjectivePoint::from_vector(vec2(0.0, Complex(0, 3)));
  EXPECT_NEAR(std::abs(x.vector()(1) - 1.0), 0.0, 1e-14);
  const auto y = ProjectivePoint::from_vector(vec2(-2.0, 0.0));
  EXPECT_NEAR(std::abs(y.vector()(0) - 1.0), 0.0, 1e-14);
  const auto z = ProjectivePoint::from_vector(vec2(1.0, 1.0));
  EXPECT_NEAR(z.vector()(0).real(), std::sqrt(0.5), 1e-14);
  EXPECT_NEAR(z.vector()(1).real(), std::sqrt(0.5), 1e-14);
}

TEST(ProjectivePoint, RejectsZeroAndNonFinite) {
  EXPECT_THROW(ProjectivePoint::from_vector(vec2(0.0, 0.0)), Error);
  EXPECT_THROW(ProjectivePoint::from_vector(vec2(std::nan(""), 1.0)), Error);
}

TEST(Distance, Values) {
  const auto e1 = ProjectivePoint::basis(2, 0);
  const auto e2 = ProjectivePoint::basis(2, 1);
  const auto d = ProjectivePoint::from_vector(vec2(1.0, 1.0));
  EXPECT_DOUBLE_EQ(distance(e1, e2), 1.0);
  EXPECT_DOUBLE_EQ(distance(d, d), 0.0);
  EXPECT_NEAR(distance(e1, d), std::sqrt(0.5), 1e-14);
}

TEST(Distance, MetricAxiomsOnRandomTriples) {
  Rng rng(11);
  for (int t = 0; t < 300; ++t) {
    const int k = 2 + t % 3;
    const auto x = sample_fubini_study(k, rng);
    const auto y = sample_fubini_study(k, rng);
    const auto z = sample_fubini_study(k, rng);
    EXPECT_NEAR(distance(x, y), distance(y, x), 1e-15);
    EXPECT_LE(distance(x, z), distance(x, y) + distance(y, z) + 1e-12);
    EXPECT_GE(distance(x, y), 0.0);
    EXPECT_LE(distance(x, y), 1.0);
  }
}

TEST(Apply, OrbitStepOfSecondExample) {
  ComplexMatrix v2(2, 2);
  v2 << 0.0, Complex(0, 1), Complex(0, 1), 0.0;
  const auto ez = ProjectivePoint::from_vector(vec2(1.0, 2.0));
  const auto image = qtraj::apply(v2, ez);
  EXPECT_NEAR(distance(image, ProjectivePoint::from_vector(vec2(1.0, 0.5))), 0.0, 1e-14);
  EXPECT_NEAR(distance(qtraj::apply(ComplexMatrix::Identity(2, 2), ez), ez), 0.0, 1e-15);
}

TEST(Apply, AnnihilationThrows) {
  ComplexMatrix a(2, 2);
  a << 0.0, 1.0, 0.0, 0.0;
  try {
    qtraj::apply(a, ProjectivePoint::basis(2, 0));
    FAIL() << "expected annihilation";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kAnnihilation);
  }
}

TEST(FubiniStudy, DimensionOne) {
  Rng rng(1);
  const auto x = sample_fubini_study(1, rng);
  EXPECT_NEAR(std::abs(x.vector()(0) - 1.0), 0.0, 1e-14);
}

TEST(FubiniStudy, MomentsMatchUniformLaw) {
  Rng rng(5);
  constexpr int kSamples = 100000;
  ComplexMatrix mean = ComplexMatrix::Zero(3, 3);
  double d2 = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    mean += sample_fubini_study(3, rng).projector();
    const auto y = sample_fubini_study(2, rng);
    d2 += std::pow(distance(y, ProjectivePoint::basis(2, 0)), 2);
  }
  mean /= static_cast<double>(kSamples);
  EXPECT_LT((mean - ComplexMatrix::Identity(3, 3) / 3.0).norm(), 0.02);
  EXPECT_NEAR(d2 / kSamples, 0.5, 0.01);
}

}  // namespace
}  // namespace qtraj
