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

#include <doctest.h>

#include <cmath>
#include <cstring>

#include "slqmf/rng.hpp"
#include "support/instances.hpp"

using namespace slqmf;
using namespace slqmf::testing;

namespace {

ControlLaw zero_control(const ProblemSpec& spec) {
  ControlLaw law;
  law.u0_cell.assign(static_cast<size_t>(spec.grid.n_steps()),
                     Vec::Zero(spec.dyn.m));
  return law;
}

}  // namespace

TEST_SUITE_BEGIN("simulate");

TEST_CASE("philox known-answer vectors") {
  const auto r0 = philox::block({0, 0, 0, 0}, {0, 0});
  CHECK(r0[0] == 0x6627e8d5u);
  CHECK(r0[1] == 0xe169c58du);
  CHECK(r0[2] == 0xbc57ac4cu);
  CHECK(r0[3] == 0x9b00dbd8u);
  const auto r1 = philox::block(
      {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
      {0xffffffffu, 0xffffffffu});
  CHECK(r1[0] == 0x408f276du);
  CHECK(r1[1] == 0x41c83b0eu);
  CHECK(r1[2] == 0xa20bc7c6u);
  CHECK(r1[3] == 0x6d5451fdu);
  const auto r2 = philox::block(
      {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
      {0xa4093822u, 0x299f31d0u});
  CHECK(r2[0] == 0xd16cfe09u);
  CHECK(r2[1] == 0x94fdccebu);
  CHECK(r2[2] == 0x5001e420u);
  CHECK(r2[3] == 0x24126ea1u);
}

TEST_CASE("draws are a pure function of the coordinates") {
  const double z = counter_normal(42, 0, 17, 3);
  CHECK(counter_normal(42, 0, 17, 3) == z);
  CHECK(counter_normal(42, 0, 17, 4) != z);
  CHECK(counter_normal(42, 1, 17, 3) != z);
  CHECK(counter_normal(43, 0, 17, 3) != z);
}

TEST_CASE("noise-free dynamics are deterministic") {
  ProblemSpec s = normalize(zero_data_spec(2, 2, Mat::Identity(2, 2)));
  s.x0 = Vec::Constant(2, 1.5);
  SimulationConfig cfg;
  cfg.n_paths = 100;
  cfg.n_steps = s.grid.n_steps();
  const SimulationReport rep = simulate(s, zero_control(s), cfg);
  CHECK((rep.mean_XT - s.x0).norm() == doctest::Approx(0.0));
  CHECK(rep.se_XT.norm() == doctest::Approx(0.0));
  CHECK(rep.se_cost == doctest::Approx(0.0));
}

TEST_CASE("arithmetic Brownian motion moments") {
  ProblemSpec s = normalize(zero_data_spec(1, 1, Mat::Identity(1, 1)));
  const double beta = 0.7;
  s.dyn.b = VectorPath::constant(Vec::Constant(1, beta));
  s.x0 = Vec::Constant(1, 2.0);
  SimulationConfig cfg;
  cfg.n_paths = 20000;
  cfg.n_steps = 200;
  cfg.master_seed = 5;
  const SimulationReport rep = simulate(s, zero_control(s), cfg);
  CHECK(std::fabs(rep.mean_XT(0) - 2.0) <= 4.0 * rep.se_XT(0));
  const double sd = rep.se_XT(0) * std::sqrt(static_cast<double>(cfg.n_paths));
  const double var = sd * sd;
  // Var[X(T)] = beta^2 T; the variance estimator's own sd is about
  // var * sqrt(2/n).
  CHECK(std::fabs(var - beta * beta) <=
        5.0 * beta * beta * std::sqrt(2.0 / cfg.n_paths));
}

TEST_CASE("reports are bit-identical across thread counts and reruns") {
  const ProblemSpec spec = build_mv_spec(example_market());
  SolveOptions sopt;
  const SolveResult res = solve_pipeline(spec, sopt);
  const ControlLaw law = ControlLaw::from_feedback(*res.feedback);
  SimulationConfig cfg;
  cfg.n_paths = 6000;
  cfg.n_steps = 500;
  cfg.master_seed = 11;
  cfg.n_threads = 1;
  const SimulationReport r1 = simulate(res.normalized, law, cfg);
  cfg.n_threads = 3;
  const SimulationReport r3 = simulate(res.normalized, law, cfg);
  cfg.n_threads = 8;
  const SimulationReport r8 = simulate(res.normalized, law, cfg);
  CHECK(std::memcmp(&r1.cost, &r3.cost, sizeof(double)) == 0);
  CHECK(std::memcmp(&r1.cost, &r8.cost, sizeof(double)) == 0);
  CHECK(r1.mean_XT == r3.mean_XT);
  CHECK(r1.se_cost == r3.se_cost);
  const SimulationReport r3b = simulate(res.normalized, law, cfg);
  CHECK(r3b.cost == r3.cost);
}

TEST_CASE("zero perturbation reproduces the baseline exactly") {
  const ProblemSpec spec = normalize(scalar_standard_spec(100));
  const SolveResult res = solve_pipeline(spec);
  const ControlLaw law = ControlLaw::from_feedback(*res.feedback);
  SimulationConfig cfg;
  cfg.n_paths = 2000;
  cfg.n_steps = 100;
  const auto rows = perturbation_test(spec, law, cfg, 2, {0.0});
  for (const PerturbationRow& r : rows) {
    CHECK(r.diff == 0.0);
    CHECK(r.se_diff == 0.0);
  }
}

TEST_CASE("perturbations cost extra and the cost is convex along rays") {
  const ProblemSpec spec = normalize(scalar_standard_spec(100));
  const SolveResult res = solve_pipeline(spec);
  const ControlLaw base = ControlLaw::from_feedback(*res.feedback);
  SimulationConfig cfg;
  cfg.n_paths = 20000;
  cfg.n_steps = 100;
  cfg.master_seed = 3;

  const auto dirs = perturbation_directions(spec, 1, 7);
  std::vector<ControlLaw> controls(3, base);
  controls[1].extra_cell = dirs[0];
  for (Vec& v : controls[1].extra_cell) v *= 0.25;
  controls[2].extra_cell = dirs[0];
  for (Vec& v : controls[2].extra_cell) v *= 0.5;
  const MultiSimulationReport multi = simulate_multi(spec, controls, cfg);

  // J(0.5) - 2 J(0.25) + J(0) >= -3 SE of the combination.
  const auto [combo, se] = multi.combo({1.0, -2.0, 1.0});
  CHECK(combo >= -3.0 * se);
  // And the one-sided differences are positive well beyond noise.
  CHECK(multi.diff_vs_first[1].diff >
        3.0 * multi.diff_vs_first[1].se_diff);
}

TEST_CASE("standard error shrinks like one over root paths") {
  const ProblemSpec spec = normalize(scalar_standard_spec(100));
  const SolveResult res = solve_pipeline(spec);
  const ControlLaw law = ControlLaw::from_feedback(*res.feedback);
  SimulationConfig cfg;
  cfg.n_paths = 8000;
  cfg.n_steps = 100;
  cfg.master_seed = 21;
  const SimulationReport small = simulate(res.normalized, law, cfg);
  cfg.n_paths = 16000;
  const SimulationReport big = simulate(res.normalized, law, cfg);
  const double ratio = big.se_cost / small.se_cost;
  CHECK(ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.20));
}

TEST_CASE("the synthesized feedback steers the mean to any target") {
  const ProblemSpec spec = build_mv_spec(example_market());
  SolveOptions sopt;
  sopt.quad_refine = true;
  const SolveResult res = solve_pipeline(spec, sopt);

  Vec d = res.optimum->d_star;
  d(0) += 0.3;
  d(1) -= 0.2;
  d(2) += 0.1;
  const Vec lambda =
      sym_solve(res.psi_form.Psi, Vec(res.psi_form.psi - d));
  const ControlLaw law = ControlLaw::from_feedback(
      make_feedback(res.normalized, res.ric, res.aux, lambda));

  // Deterministic check first: the Euler mean recursion lands on d.
  const Vec mean_fine = euler_mean_terminal(res.normalized, law, 4000);
  CHECK((mean_fine - d).norm() <= 2e-4 * (1.0 + d.norm()));

  SimulationConfig cfg;
  cfg.n_paths = 20000;
  cfg.n_steps = 500;
  cfg.master_seed = 17;
  const SimulationReport rep = simulate(res.normalized, law, cfg);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::fabs(rep.mean_XT(i) - d(i)) <= 4.0 * rep.se_XT(i));
  }
}

TEST_CASE("cost equals its decomposition and antithetic pairing works") {
  const ProblemSpec spec = normalize(scalar_standard_spec(100));
  const SolveResult res = solve_pipeline(spec);
  const ControlLaw law = ControlLaw::from_feedback(*res.feedback);
  SimulationConfig cfg;
  cfg.n_paths = 5000;
  cfg.n_steps = 100;
  SUBCASE("plain") {
    const SimulationReport rep = simulate(res.normalized, law, cfg);
    CHECK(rep.cost == rep.decomposition.total());
  }
  SUBCASE("antithetic needs even paths") {
    cfg.antithetic = true;
    cfg.n_paths = 5001;
    CHECK_THROWS_AS((void)simulate(res.normalized, law, cfg), Error);
    cfg.n_paths = 5000;
    const SimulationReport rep = simulate(res.normalized, law, cfg);
    CHECK(rep.cost == rep.decomposition.total());
    CHECK(std::fabs(rep.mean_XT(0) - res.optimum->d_star(0)) <=
          4.0 * rep.se_XT(0) + 1e-3);
  }
}

TEST_CASE("overflowing paths are counted, not hidden") {
  ProblemSpec s = zero_data_spec(1, 1, Mat::Identity(1, 1));
  s.dyn.A = MatrixPath::constant(Mat::Constant(1, 1, 60.0));
  s.x0 = Vec::Ones(1);
  const ProblemSpec spec = normalize(s);
  SimulationConfig cfg;
  cfg.n_paths = 16;
  cfg.n_steps = 200;
  const SimulationReport rep = simulate(spec, zero_control(spec), cfg);
  CHECK(rep.overflow_paths == cfg.n_paths);
}

TEST_CASE("configuration guards") {
  const ProblemSpec spec = normalize(scalar_standard_spec(100));
  SimulationConfig cfg;
  cfg.n_paths = 1;
  cfg.n_steps = 100;
  CHECK_THROWS_AS((void)simulate(spec, zero_control(spec), cfg), Error);
  cfg.n_paths = 100;
  cfg.n_steps = 150;  // not a multiple of 100
  CHECK_THROWS_AS((void)simulate(spec, zero_control(spec), cfg), Error);
}

TEST_SUITE_END();
