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

#include "slqmf/rng.hpp"
#include "slqmf/slqmf.hpp"

using namespace slqmf;

static void BM_PhiloxNormal(benchmark::State& state) {
  uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        counter_normal(42, 0, i++, static_cast<uint32_t>(i)));
  }
}
BENCHMARK(BM_PhiloxNormal);

static void BM_EulerMaruyama(benchmark::State& state) {
  const ProblemSpec spec = build_mv_spec(example_market());
  const SolveResult res = solve_pipeline(spec);
  const ControlLaw law = ControlLaw::from_feedback(*res.feedback);
  SimulationConfig cfg;
  cfg.n_paths = state.range(0);
  cfg.n_steps = 500;
  cfg.n_threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    SimulationReport rep = simulate(res.normalized, law, cfg);
    benchmark::DoNotOptimize(rep.cost);
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_paths * cfg.n_steps);
}
BENCHMARK(BM_EulerMaruyama)
    ->Args({2000, 1})
    ->Args({8000, 1})
    ->Args({8000, 2})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
