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

#include <random>

#include "qtraj/numerics.hpp"
#include "qtraj/random.hpp"

namespace {

void BM_Svd(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  qtraj::Rng rng(3);
  std::normal_distribution<double> g;
  qtraj::ComplexMatrix a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) a(i, j) = {g(rng), g(rng)};
  }
  for (auto _ : state) benchmark::DoNotOptimize(qtraj::numerics::svd(a));
}
BENCHMARK(BM_Svd)->Arg(2)->Arg(4)->Arg(8);

}  // namespace
