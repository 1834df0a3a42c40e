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

#include "perturbmc/diagnostics.hpp"
#include "perturbmc/inverse_problem.hpp"
#include "perturbmc/samplers.hpp"

namespace {

using namespace perturbmc;

void BM_RwmGaussian(benchmark::State& state) {
  const MHKernel kernel = MHKernel::random_walk(targets::standard_gaussian(8), 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_chain(kernel, Vector::Zero(8), 1000, 3).acceptance_count);
  }
}
BENCHMARK(BM_RwmGaussian);

void BM_RwmPosterior(benchmark::State& state) {
  const ObservedData data = synth_data(PPParams{kThetaTrue}, 0.0078125, 1);
  const MHKernel kernel =
      MHKernel::random_walk(posterior_target(ForwardSpec::with_step(0.0625), data), 2e-6);
  const Vector x0 = probit_inverse(PPParams{kThetaTrue});
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_chain(kernel, x0, 200, 3).acceptance_count);
  }
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_RwmPosterior);

void BM_PtPosterior(benchmark::State& state) {
  const ObservedData data = synth_data(PPParams{kThetaTrue}, 0.0078125, 1);
  const ForwardSpec spec = ForwardSpec::with_step(0.0625);
  PTConfig config;
  for (double beta : tempering_ladder(4, 1.3))
    config.levels.push_back(PTLevel{MHKernel::random_walk(tempered_target(spec, data, beta), 2e-6), 1});
  const std::vector<Vector> init(5, probit_inverse(PPParams{kThetaTrue}));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pt_run(config, init, 100, 3, {4}).swap_stats.attempts[0]);
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_PtPosterior);

void BM_AutocorrTime(benchmark::State& state) {
  const long n = state.range(0);
  RngStream rng(5);
  std::vector<double> series(static_cast<std::size_t>(n));
  double x = 0.0;
  for (auto& v : series) {
    x = 0.9 * x + rng.normal();
    v = x;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(autocorr_time(series).tau);
  }
}
BENCHMARK(BM_AutocorrTime)->Arg(100000)->Arg(1000000);

}  // namespace
