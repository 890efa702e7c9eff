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

#include "qtraj/channel.hpp"
#include "qtraj/kraus.hpp"
#include "qtraj/trajectory.hpp"

namespace {

void BM_Analyze(benchmark::State& state) {
  const auto m = qtraj::builtin_model("rotating_damping");
  for (auto _ : state) benchmark::DoNotOptimize(qtraj::analyze(m));
}
BENCHMARK(BM_Analyze);

void BM_ComputeF(benchmark::State& state) {
  const auto m = qtraj::builtin_model("rotating_damping");
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qtraj::compute_f(m, n));
}
BENCHMARK(BM_ComputeF)->DenseRange(4, 12, 4);

}  // namespace
