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
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qtraj/assignment.hpp"
#include "qtraj/error.hpp"
#include "qtraj/network_simplex.hpp"
#include "qtraj/transport.hpp"

namespace qtraj {
namespace {

std::vector<double> random_weights(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  for (auto& x : w) x = 0.05 + uniform01(rng);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= total;
  return w;
}

std::vector<ProjectivePoint> random_points(std::size_t n, int dim, Rng& rng) {
  std::vector<ProjectivePoint> p;
  for (std::size_t i = 0; i < n; ++i) p.push_back(sample_fubini_study(dim, rng));
  return p;
}

std::vector<double> costs(const std::vector<ProjectivePoint>& a,
                          const std::vector<ProjectivePoint>& b) {
  std::vector<double> c;
  for (const auto& x : a) {
    for (const auto& y : b) c.push_back(distance(x, y));
  }
  return c;
}

TEST(W1, DiracPair) {
  Rng rng(1);
  const auto x = sample_fubini_study(2, rng);
  const auto y = sample_fubini_study(2, rng);
  EXPECT_NEAR(w1(EmpiricalMeasure::dirac(x), EmpiricalMeasure::dirac(y)), distance(x, y), 1e-15);
}

TEST(W1, SelfDistanceIsZero) {
  Rng rng(2);
  const EmpiricalMeasure nu(random_points(6, 3, rng), random_weights(6, rng));
  EXPECT_NEAR(w1(nu, nu), 0.0, 1e-15);
}

TEST(W1, HalfSplitAgainstDirac) {
  const auto e1 = ProjectivePoint::basis(2, 0);
  const auto e2 = ProjectivePoint::basis(2, 1);
  const EmpiricalMeasure a({e1, e2}, {0.5, 0.5});
  EXPECT_NEAR(w1(a, EmpiricalMeasure::dirac(e1)), 0.5, 1e-15);
  const std::vector<double> plan_cost{0.0, 1.0};
  EXPECT_NEAR(oracle::transport_by_vertices({0.5, 0.5}, {1.0}, plan_cost), 0.5, 1e-15);
}

TEST(W1, MatchesVertexEnumeration) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t na = 1 + trial % 4;
    const std::size_t nb = 1 + (trial / 4) % 4;
    const auto pa = random_points(na, 2 + trial % 2, rng);
    const auto pb = random_points(nb, 2 + trial % 2, rng);
    const bool uniform = trial % 5 == 0 && na == nb;
    const auto wa = uniform ? std::vector<double>(na, 1.0 / na) : random_weights(na, rng);
    const auto wb = uniform ? std::vector<double>(nb, 1.0 / nb) : random_weights(nb, rng);
    const double expected = oracle::transport_by_vertices(wa, wb, costs(pa, pb));
    EXPECT_NEAR(w1(EmpiricalMeasure(pa, wa), EmpiricalMeasure(pb, wb)), expected, 1e-9)
        << "trial " << trial;
  }
}

TEST(W1, MetricAxioms) {
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const EmpiricalMeasure a(random_points(4, 2, rng), random_weights(4, rng));
    const EmpiricalMeasure b(random_points(3, 2, rng), random_weights(3, rng));
    const EmpiricalMeasure c(random_points(5, 2, rng), random_weights(5, rng));
    EXPECT_NEAR(w1(a, b), w1(b, a), 1e-12);
    EXPECT_LE(w1(a, c), w1(a, b) + w1(b, c) + 1e-12);
    EXPECT_GE(w1(a, b), 0.0);
  }
}

TEST(W1, DuplicateRaysAreMerged) {
  const auto e1 = ProjectivePoint::basis(2, 0);
  const auto e2 = ProjectivePoint::basis(2, 1);
  // 10 000 copies collapse to two atoms, far below the budget.
  std::vector<ProjectivePoint> many;
  for (int i = 0; i < 10000; ++i) many.push_back(i % 2 ? e1 : e2);
  const auto a = EmpiricalMeasure::uniform(many);
  EXPECT_EQ(a.merged().size(), 2u);
  EXPECT_NEAR(w1(a, EmpiricalMeasure::dirac(e1)), 0.5, 1e-12);
}

TEST(W1, BudgetIsEnforced) {
  Rng rng(5);
  const auto a = EmpiricalMeasure::uniform(random_points(30, 2, rng));
  const auto b = EmpiricalMeasure::uniform(random_points(30, 2, rng));
  try {
    w1(a, b, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBudget);
  }
}

TEST(Solvers, AssignmentAgreesWithNetworkSimplex) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + trial * 7;
    const auto pa = random_points(static_cast<std::size_t>(n), 2, rng);
    const auto pb = random_points(static_cast<std::size_t>(n), 2, rng);
    const auto c = costs(pa, pb);
    const auto jv = solve_assignment(c, n);
    const std::vector<double> mass(static_cast<std::size_t>(n), 1.0 / n);
    const auto ns = solve_transport(mass, mass, c);
    EXPECT_NEAR(jv.total_cost / n, ns.total_cost, 1e-10) << "n = " << n;
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (int col : jv.row_to_col) ++seen[static_cast<std::size_t>(col)];
    for (int s : seen) EXPECT_EQ(s, 1);
  }
}

TEST(Solvers, SparseAssignmentMatchesDense) {
  Rng rng(8);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 3 + trial * 37;
    // Geometric costs with few candidates, then unstructured costs.
    const auto c = trial % 2 == 0 ? costs(random_points(static_cast<std::size_t>(n), 2, rng),
                                          random_points(static_cast<std::size_t>(n), 2, rng))
                                  : random_weights(static_cast<std::size_t>(n * n), rng);
    const CostFunction f = [&](int i, int j) {
      return c[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
               static_cast<std::size_t>(j)];
    };
    const auto dense = solve_assignment(c, n);
    const auto sparse = solve_assignment_sparse(n, f, 1 + trial % 4);
    EXPECT_NEAR(sparse.total_cost, dense.total_cost, 1e-10) << "n = " << n;
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (int col : sparse.row_to_col) ++seen[static_cast<std::size_t>(col)];
    for (int s : seen) EXPECT_EQ(s, 1);
  }
}

TEST(W1, LargeUniformMeasuresUseExactMatching) {
  Rng rng(9);
  const auto a = EmpiricalMeasure::uniform(random_points(1500, 2, rng));
  const auto b = EmpiricalMeasure::uniform(random_points(1500, 2, rng));
  const auto dense = solve_assignment(costs(a.points(), b.points()), 1500);
  EXPECT_NEAR(w1(a, b), dense.total_cost / 1500.0, 1e-12);
}

TEST(Solvers, TransportPlanHasRequestedMarginals) {
  Rng rng(7);
  const auto wa = random_weights(12, rng);
  const auto wb = random_weights(9, rng);
  const auto c = costs(random_points(12, 3, rng), random_points(9, 3, rng));
  const auto r = solve_transport(wa, wb, c);
  std::vector<double> rows(12, 0.0), cols(9, 0.0);
  double total = 0.0;
  for (const auto& e : r.plan) {
    EXPECT_GE(e.mass, -1e-15);
    rows[static_cast<std::size_t>(e.source)] += e.mass;
    cols[static_cast<std::size_t>(e.sink)] += e.mass;
    total += e.mass * c[static_cast<std::size_t>(e.source) * 9 + static_cast<std::size_t>(e.sink)];
  }
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(rows[i], wa[i], 1e-12);
  for (std::size_t j = 0; j < 9; ++j) EXPECT_NEAR(cols[j], wb[j], 1e-12);
  EXPECT_NEAR(total, r.total_cost, 1e-12);
}

TEST(CesaroMix, Cases) {
  const auto e1 = ProjectivePoint::basis(2, 0);
  const auto e2 = ProjectivePoint::basis(2, 1);
  const auto one = cesaro_mix({EmpiricalMeasure::dirac(e1)});
  EXPECT_NEAR(w1(one, EmpiricalMeasure::dirac(e1)), 0.0, 1e-15);

  const auto mix = cesaro_mix({EmpiricalMeasure::dirac(e1), EmpiricalMeasure::dirac(e2)});
  EXPECT_NEAR(w1(mix, EmpiricalMeasure({e1, e2}, {0.5, 0.5})), 0.0, 1e-15);

  Rng rng(8);
  const EmpiricalMeasure nu(random_points(5, 2, rng), random_weights(5, rng));
  const auto copies = cesaro_mix({nu, nu, nu}).merged();
  EXPECT_EQ(copies.size(), 5u);
  EXPECT_NEAR(w1(copies, nu), 0.0, 1e-14);
}

TEST(EmpiricalMeasure, RejectsBadWeights) {
  const auto e1 = ProjectivePoint::basis(2, 0);
  EXPECT_THROW(EmpiricalMeasure({e1}, {-1.0}), Error);
  EXPECT_THROW(EmpiricalMeasure({e1, e1}, {1.0}), Error);
}

}  // namespace
}  // namespace qtraj
