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

#include <benchmark/benchmark.h>

#include <vector>

#include "qtraj/assignment.hpp"
#include "qtraj/network_simplex.hpp"
#include "qtraj/projective.hpp"
#include "qtraj/random.hpp"
#include "qtraj/transport.hpp"

namespace {

std::vector<qtraj::ProjectivePoint> cloud(std::size_t n, std::uint64_t seed) {
  qtraj::Rng rng(seed);
  std::vector<qtraj::ProjectivePoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(qtraj::sample_fubini_study(2, rng));
  return pts;
}

void BM_Assignment(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto cost = qtraj::distance_matrix(cloud(n, 1), cloud(n, 2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qtraj::solve_assignment(cost, static_cast<int>(n)));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Assignment)->RangeMultiplier(4)->Range(64, 4096)->Unit(benchmark::kMillisecond);

void BM_NetworkSimplex(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto cost = qtraj::distance_matrix(cloud(n, 1), cloud(n + 1, 2));
  const std::vector<double> supply(n, 1.0 / static_cast<double>(n));
  const std::vector<double> demand(n + 1, 1.0 / static_cast<double>(n + 1));
  for (auto _ : state) benchmark::DoNotOptimize(qtraj::solve_transport(supply, demand, cost));
}
BENCHMARK(BM_NetworkSimplex)->RangeMultiplier(4)->Range(16, 256)->Unit(benchmark::kMillisecond);

}  // namespace
