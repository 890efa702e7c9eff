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

#include <memory>

#include "qtraj/kraus.hpp"
#include "qtraj/trajectory.hpp"

namespace {

void BM_PureStep(benchmark::State& state) {
  auto kernel =
      std::make_shared<const qtraj::TransitionKernel>(qtraj::builtin_model("rotating_damping"));
  qtraj::TrackingOptions opts;
  opts.product = state.range(0) != 0;
  opts.lyapunov = state.range(0) != 0;
  auto s = qtraj::TrajectoryState::pure(kernel, qtraj::ProjectivePoint::basis(2, 0), 9, 0, opts);
  for (auto _ : state) benchmark::DoNotOptimize(s.step());
}
BENCHMARK(BM_PureStep)->Arg(0)->Arg(1);

void BM_DensityStep(benchmark::State& state) {
  auto kernel =
      std::make_shared<const qtraj::TransitionKernel>(qtraj::builtin_model("rotating_damping"));
  auto s = qtraj::TrajectoryState::density(kernel, qtraj::DensityMatrix::maximally_mixed(2), 9);
  for (auto _ : state) benchmark::DoNotOptimize(s.step());
}
BENCHMARK(BM_DensityStep);

}  // namespace
