// Copyright 2026 The perturbmc Authors
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

#include "perturbmc/inverse_problem.hpp"

namespace {

using namespace perturbmc;

void BM_ForwardSolve(benchmark::State& state) {
  const PPParams truth{kThetaTrue};
  const ForwardSpec spec = ForwardSpec::with_step(0.5 * std::pow(2.0, -state.range(0)));
  for (auto _ : state) {
    auto f = forward(truth, spec);
    benchmark::DoNotOptimize(f);
  }
  state.SetLabel("h = 0.5 * 2^-" + std::to_string(state.range(0)));
}
BENCHMARK(BM_ForwardSolve)->DenseRange(0, 6);

void BM_LogPosterior(benchmark::State& state) {
  const double h = 0.5 * std::pow(2.0, -state.range(0));
  const ObservedData data = synth_data(PPParams{kThetaTrue}, 0.0078125, 1);
  const ForwardSpec spec = ForwardSpec::with_step(h);
  const Vector x = probit_inverse(PPParams{kThetaTrue});
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_posterior(x, spec, data));
  }
}
BENCHMARK(BM_LogPosterior)->DenseRange(1, 4);

void BM_PosteriorGradient(benchmark::State& state) {
  const ObservedData data = synth_data(PPParams{kThetaTrue}, 0.0078125, 1);
  const LogTarget target = posterior_target(ForwardSpec::with_step(0.0625), data);
  const Vector x = probit_inverse(PPParams{kThetaTrue});
  for (auto _ : state) {
    auto g = target.gradient(x);  // central differences: 16 forward solves
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_PosteriorGradient);

}  // namespace

BENCHMARK_MAIN();
