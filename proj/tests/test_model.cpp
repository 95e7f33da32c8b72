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

#include "slqmf/json_io.hpp"
#include "support/instances.hpp"

using namespace slqmf;
using namespace slqmf::testing;

TEST_SUITE_BEGIN("model");

TEST_CASE("scalar standard case supports the standard assumptions") {
  // With D = G = 1 the singular assumptions hold too, so the strongest
  // supported tag is Both.
  const CaseTag tag = validate(scalar_standard_spec());
  CHECK(tag.standard());
  CHECK(tag.variant == CaseTag::Variant::kBoth);
  CHECK(tag.delta_R == doctest::Approx(1.0));
  CHECK(tag.delta_G == doctest::Approx(1.0));
}

TEST_CASE("example market classifies as singular") {
  const ProblemSpec spec = build_mv_spec(example_market());
  const CaseTag tag = validate(spec);
  CHECK(tag.variant == CaseTag::Variant::kSingular);
  CHECK(tag.delta_R == doctest::Approx(0.0));
  CHECK(tag.delta_DtD == doctest::Approx(0.0025));
  CHECK(tag.delta_G > 0.0);
}

TEST_CASE("no positivity anywhere classifies as neither") {
  ProblemSpec s = scalar_standard_spec();
  s.cost.R = MatrixPath::constant(Mat::Zero(1, 1));
  s.dyn.D = MatrixPath::constant(Mat::Zero(1, 1));
  s.cost.G = Mat::Zero(1, 1);
  const CaseTag tag = validate(s);
  CHECK(tag.variant == CaseTag::Variant::kNeither);
  CHECK_THROWS_AS((void)integrate(s), Error);
}

TEST_CASE("dimension and symmetry guards") {
  ProblemSpec s = scalar_standard_spec();
  s.x0 = Vec::Zero(2);
  CHECK_THROWS_WITH_AS((void)validate(s), doctest::Contains("x0"), Error);

  ProblemSpec t = random_instance(3, {.n = 2, .m = 2});
  t.cost.G(0, 1) += 1e-6;  // beyond the 1e-12 symmetry budget
  CHECK_THROWS_AS((void)validate(t), Error);

  ProblemSpec u = random_instance(4, {.n = 2, .m = 2});
  u.cost.G(0, 1) += 1e-13;  // within budget: accepted
  CHECK_NOTHROW((void)validate(u));
}

TEST_CASE("normalize is the identity on already-normalized data") {
  ProblemSpec s = scalar_standard_spec();
  const ProblemSpec out = normalize(s);
  CHECK(out.cost.cost_shift == 0.0);
  CHECK(out.cost.zeta(0) == 0.0);
  CHECK(problem_to_json(out).dump() == problem_to_json(s).dump());
}

TEST_CASE("normalize folds p into the offsets") {
  ProblemSpec s = scalar_standard_spec();
  s.cost.p = VectorPath::constant(Vec::Ones(1));
  const ProblemSpec out = normalize(s);
  CHECK(out.cost.p.is_zero());
  CHECK(out.dyn.a.at_cell(0)(0) == doctest::Approx(1.0));
  CHECK(out.dyn.b.at_cell(0)(0) == doctest::Approx(1.0));
}

TEST_CASE("normalize reduces the mean-field data") {
  // eta = e1 against the market's initially displayed risk matrix.
  MVModel mv = example_market();
  mv.Sigma = example_sigma_initial();
  ProblemSpec s = build_mv_spec(mv);
  s.cost.eta = Vec::Zero(3);
  s.cost.eta(0) = 1.0;
  const ProblemSpec out = normalize(s);
  CHECK(out.cost.zeta(0) == doctest::Approx(-3.5));
  CHECK(out.cost.zeta(1) == doctest::Approx(-0.6));
  CHECK(out.cost.zeta(2) == doctest::Approx(0.5));
  CHECK(out.cost.cost_shift == doctest::Approx(-3.5));
}

TEST_CASE("normalize is idempotent") {
  const ProblemSpec s =
      random_instance(11, {.n = 3, .m = 2, .piecewise = true});
  const ProblemSpec once = normalize(s);
  const ProblemSpec twice = normalize(once);
  CHECK(problem_to_json(once).dump() == problem_to_json(twice).dump());
  CHECK(once.cost.cost_shift == twice.cost.cost_shift);
}

TEST_CASE("validate does not mutate its input") {
  const ProblemSpec s = random_instance(12, {.n = 2, .m = 1});
  const std::string before = problem_to_json(s).dump();
  (void)validate(s);
  CHECK(problem_to_json(s).dump() == before);
}

TEST_CASE("unnormalized cost equals normalized cost plus recorded shift") {
  ProblemSpec raw = random_instance(13, {.n = 2, .m = 2});
  raw.dyn.A = MatrixPath::constant(0.2 * raw.dyn.A.at_cell(0));
  const ProblemSpec norm = normalize(raw);

  // Same underlying control: u_raw = u_norm + p, simulated on the same
  // Brownian draws. Running and terminal-G parts must agree pathwise.
  ControlLaw law_norm;
  law_norm.u0_cell.assign(static_cast<size_t>(raw.grid.n_steps()),
                          Vec::Constant(2, 0.1));
  ControlLaw law_raw = law_norm;
  for (int k = 0; k < raw.grid.n_steps(); ++k) {
    law_raw.u0_cell[static_cast<size_t>(k)] += raw.cost.p.at_cell(k);
  }

  SimulationConfig cfg;
  cfg.n_paths = 4000;
  cfg.n_steps = raw.grid.n_steps();
  cfg.master_seed = 99;
  const SimulationReport rep_raw = simulate(raw, law_raw, cfg);
  const SimulationReport rep_norm = simulate(norm, law_norm, cfg);

  CHECK(rep_raw.decomposition.running_R ==
        doctest::Approx(rep_norm.decomposition.running_R).epsilon(1e-12));
  CHECK(rep_raw.decomposition.terminal_G ==
        doctest::Approx(rep_norm.decomposition.terminal_G).epsilon(1e-12));
  CHECK(rep_raw.cost == doctest::Approx(rep_norm.cost).epsilon(1e-12));

  // The zeta reduction: <Gbar(m-eta), m-eta> = <Gbar m, m> - 2<zeta, m>
  // + cost_shift at any empirical mean m.
  const Vec m = rep_norm.mean_XT;
  const double eta_form = rep_norm.decomposition.terminal_meanfield;
  const double zeta_form = m.dot(norm.cost.Gbar * m) -
                           2.0 * norm.cost.zeta.dot(m) +
                           norm.cost.cost_shift;
  CHECK(eta_form == doctest::Approx(zeta_form).epsilon(1e-12));
}

TEST_SUITE_END();
