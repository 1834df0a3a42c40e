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

#include "perturbmc/densities.hpp"
#include "perturbmc/finite_oracle.hpp"

namespace {

using namespace perturbmc;

void BM_SpectralGap(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FiniteChain chain = random_reversible_chain(n, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectral_gap(chain).kappa);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_SpectralGap)->RangeMultiplier(2)->Range(25, 400)->Complexity();

void BM_Stationary(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  FiniteChain chain = random_reversible_chain(n, 7);
  chain.pi.reset();
  for (auto _ : state) {
    benchmark::DoNotOptimize(stationary(chain));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_Stationary)->RangeMultiplier(2)->Range(25, 400)->Complexity();

void BM_DiscretizeRwm(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  const MHKernel kernel = MHKernel::random_walk(targets::truncated_gaussian_1d(-4.0, 4.0), 0.5);
  const UniformGrid grid = UniformGrid::interval(-4.0, 4.0, cells);
  for (auto _ : state) {
    benchmark::DoNotOptimize(discretize_kernel(kernel, grid).P.sum());
  }
}
BENCHMARK(BM_DiscretizeRwm)->Arg(101)->Arg(201)->Arg(401);

void BM_OpNormDiff(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FiniteChain base = random_reversible_chain(n, 9);
  const PerturbationFamily family = lazy_mix_family(base);
  const FiniteChain pert = family.chain_at(0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(op_norm_diff(base, pert, *base.pi));
  }
}
BENCHMARK(BM_OpNormDiff)->Arg(50)->Arg(200);

}  // namespace
