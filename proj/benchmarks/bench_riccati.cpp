/*
 Copyright 2026 The slqmf Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <benchmark/benchmark.h>

#include "slqmf/slqmf.hpp"

using namespace slqmf;

static void BM_RiccatiIntegrate(benchmark::State& state) {
  MVModel mv = example_market();
  mv.steps = static_cast<int>(state.range(0));
  const ProblemSpec spec = build_mv_spec(mv);
  for (auto _ : state) {
    RiccatiSolution ric = integrate(spec);
    benchmark::DoNotOptimize(ric.min_eig_P);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) *
                          kDefaultSubsteps);
}
BENCHMARK(BM_RiccatiIntegrate)->Arg(100)->Arg(500)->Arg(2000);

static void BM_FullPipeline(benchmark::State& state) {
  MVModel mv = example_market();
  mv.steps = static_cast<int>(state.range(0));
  const ProblemSpec spec = build_mv_spec(mv);
  SolveOptions opt;
  opt.quad_refine = state.range(1) != 0;
  for (auto _ : state) {
    SolveResult res = solve_pipeline(spec, opt);
    benchmark::DoNotOptimize(res.optimum->value_psi);
  }
}
BENCHMARK(BM_FullPipeline)
    ->Args({200, 0})
    ->Args({200, 1})
    ->Args({500, 0})
    ->Args({500, 1});

BENCHMARK_MAIN();
