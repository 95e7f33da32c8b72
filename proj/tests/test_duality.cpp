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

#include "support/instances.hpp"

using namespace slqmf;
using namespace slqmf::testing;

TEST_SUITE_BEGIN("duality");

TEST_CASE("reachability certificate") {
  SUBCASE("no control channel means no reachability") {
    const ProblemSpec s = zero_data_spec(2, 2, Mat::Identity(2, 2));
    const FeasibilityCertificate cert = feasibility(s);
    CHECK(cert.integral_norm == doctest::Approx(0.0));
    CHECK_FALSE(cert.feasible_for_all_d);
  }
  SUBCASE("identity drift channel integrates to sqrt(n) T") {
    ProblemSpec s = zero_data_spec(3, 3, Mat::Identity(3, 3));
    s.dyn.B = MatrixPath::constant(Mat::Identity(3, 3));
    const FeasibilityCertificate cert = feasibility(s);
    CHECK(cert.integral_norm ==
          doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(cert.feasible_for_all_d);
    CHECK((cert.Y.front() - Mat::Identity(3, 3)).norm() == 0.0);
  }
  SUBCASE("example market integrates |B| over the horizon") {
    const ProblemSpec s = build_mv_spec(example_market());
    const FeasibilityCertificate cert = feasibility(s);
    CHECK(cert.integral_norm ==
          doctest::Approx(s.dyn.B.at_cell(0).norm()).epsilon(1e-12));
  }
}

TEST_CASE("degenerate quadrature: no control channels at all") {
  const ProblemSpec s = normalize(zero_data_spec(2, 2, Mat::Identity(2, 2)));
  const RiccatiSolution ric = integrate(s);
  const AuxiliarySolution aux = solve_auxiliary(s, ric);
  const PsiForm f = compute_psi(s, ric, aux);
  CHECK(f.Psi.norm() == doctest::Approx(0.0));
}

TEST_CASE("quadratic coefficient matches a fine-grid oracle") {
  ProblemSpec spec = normalize(scalar_standard_spec());
  const RiccatiSolution ric = integrate(spec);
  const AuxiliarySolution aux = solve_auxiliary(spec, ric);
  const PsiForm f = compute_psi(spec, ric, aux, /*quad_refine=*/true);

  // Oracle: trapezoid of (B H^1)^2 / (D^T P D + R) on a grid 10x finer.
  ProblemSpec fine_spec = spec;
  fine_spec.grid = TimeGrid(1.0, 10 * spec.grid.n_steps());
  const RiccatiSolution fric = integrate(fine_spec);
  AuxiliarySolution faux;
  solve_H_system(fine_spec, fric, faux);
  const double h = fine_spec.grid.dt();
  double integral = 0.0;
  double prev = 0.0;
  for (size_t k = 0; k < faux.H.size(); ++k) {
    const double P = fric.P[k](0, 0);
    const double H1 = faux.H[k](0, 1);
    const double g = H1 * H1 / (P + 1.0);
    if (k > 0) integral += 0.5 * h * (prev + g);
    prev = g;
  }
  CHECK(f.Psi(0, 0) == doctest::Approx(integral).epsilon(1e-7));
}

TEST_CASE("both dual expansions describe the same value function") {
  for (uint64_t seed = 60; seed < 64; ++seed) {
    const int n = 1 + static_cast<int>(seed % 4);
    const int m = 1 + static_cast<int>(seed % n);
    const ProblemSpec spec = normalize(random_instance(
        seed, {.n = n, .m = m, .piecewise = seed % 2 == 0}));
    SolveOptions opt;
    opt.quad_refine = true;
    const SolveResult res = check_pipeline(spec, opt);
    REQUIRE(res.phi_form.has_value());
    const Mat Ginv = sym_inverse(res.normalized.cost.G, "G");
    CHECK((res.psi_form.Psi - (Ginv - res.phi_form->Phi)).norm() <=
          1e-8 * (1.0 + res.psi_form.Psi.norm()));
    CHECK((res.psi_form.psi - res.phi_form->phi).norm() <= 1e-8);
    CHECK(std::fabs(res.psi_form.Delta - res.phi_form->delta) <= 1e-7);
    CHECK(res.verdicts.min_eig_Psi > 0.0);
    CHECK(res.verdicts.max_eig_Phi_shift < 0.0);
  }
}

TEST_CASE("example market verdicts") {
  const ProblemSpec spec = build_mv_spec(example_market());
  SolveOptions opt;
  opt.quad_refine = true;
  const SolveResult res = check_pipeline(spec, opt);
  CHECK(res.verdicts.type1);
  CHECK(res.verdicts.type2);
  CHECK_FALSE(res.verdicts.cond1);  // Gbar + G = 0 is not strictly positive
  CHECK(res.verdicts.cond2);        // Phi > 0 and Gbar + G >= 0
  CHECK(res.verdicts.cond3);
  CHECK(res.verdicts.min_eig_Psi > 0.0);
}

TEST_CASE("zero mean-field penalty is always solvable") {
  ProblemSpec spec = normalize(random_instance(65, {.n = 2, .m = 2}));
  spec.cost.Gbar = Mat::Zero(2, 2);
  const SolveResult res = check_pipeline(spec);
  CHECK(res.verdicts.cond1);
  CHECK(res.verdicts.type1);
  CHECK(res.verdicts.type2);
}

TEST_CASE("slightly negative Gbar + G passes through the third condition") {
  // P(t) = 1/(1+T-t) componentwise, so Phi = P(0) I = 0.5 I and the
  // third-condition bound is -(I - Phi)^{-1} = -2 I.
  ProblemSpec s = zero_data_spec(2, 2, Mat::Identity(2, 2));
  s.dyn.B = MatrixPath::constant(Mat::Identity(2, 2));
  Vec gbar(2);
  gbar << -1.01, -0.5;
  s.cost.Gbar = gbar.asDiagonal();
  const SolveResult res = check_pipeline(normalize(s));
  CHECK(min_eig(symmetrize(s.cost.Gbar + s.cost.G)) ==
        doctest::Approx(-0.01));
  CHECK_FALSE(res.verdicts.cond1);
  CHECK(res.verdicts.cond3);
  CHECK(res.verdicts.type2);
  const DualOptimum opt =
      optimize(res.normalized, res.psi_form, res.phi_form, res.verdicts);
  CHECK(opt.d_star.allFinite());
}

TEST_CASE("each specific condition implies the second-type condition") {
  int hits = 0;
  for (uint64_t seed = 70; seed < 90; ++seed) {
    const int n = 1 + static_cast<int>(seed % 3);
    const ProblemSpec spec =
        normalize(random_instance(seed, {.n = n, .m = n}));
    const SolveResult res = check_pipeline(spec);
    if (res.verdicts.cond1 || res.verdicts.cond2 || res.verdicts.cond3) {
      ++hits;
      CHECK(res.verdicts.type2);
    }
  }
  CHECK(hits > 0);  // the sample must actually exercise the implication
}

TEST_CASE("symmetric instance optimizes to the origin") {
  ProblemSpec s = zero_data_spec(2, 2, Mat::Identity(2, 2));
  s.dyn.B = MatrixPath::constant(Mat::Identity(2, 2));
  const SolveResult res = check_pipeline(normalize(s));
  const DualOptimum opt =
      optimize(res.normalized, res.psi_form, res.phi_form, res.verdicts);
  CHECK(opt.d_star.norm() == doctest::Approx(0.0));
  CHECK(opt.lambda_star.norm() == doctest::Approx(0.0));
}

TEST_CASE("target solve agrees with a conjugate-gradient oracle") {
  const ProblemSpec spec = normalize(random_instance(91, {.n = 4, .m = 3}));
  SolveOptions sopt;
  sopt.quad_refine = true;
  const SolveResult res = check_pipeline(spec, sopt);
  REQUIRE(res.verdicts.solvable());
  const DualOptimum opt =
      optimize(res.normalized, res.psi_form, res.phi_form, res.verdicts);

  const Mat Psi_inv = sym_inverse(res.psi_form.Psi, "Psi");
  const Mat hess = symmetrize(res.normalized.cost.Gbar + Psi_inv);
  const Vec rhs = Psi_inv * res.psi_form.psi + res.normalized.cost.zeta;
  const Vec d_cg = cg_solve(hess, rhs);
  CHECK((opt.d_star - d_cg).norm() <= 1e-9 * (1.0 + d_cg.norm()));
}

TEST_CASE("example market value equals the closed form") {
  const MVModel mv = example_market();
  const ProblemSpec spec = build_mv_spec(mv);
  SolveOptions sopt;
  sopt.quad_refine = true;
  const SolveResult res = solve_pipeline(spec, sopt);
  const MVClosedForm cf = closed_form_value(mv, res.ric.P.front());
  CHECK(std::fabs(cf.value_display + res.optimum->value_psi) <= 1e-6);
  CHECK(std::fabs(res.optimum->value_psi - res.optimum->value_phi) <=
        1e-6 * (1.0 + std::fabs(res.optimum->value_psi)));
  CHECK((res.optimum->d_star - cf.d_star).norm() <= 1e-7);
  CHECK((res.optimum->lambda_star - cf.lambda_star).norm() <= 1e-7);
  // phi = Sigma^{-1} P(0) (x - xi) + xi, here with a vanishing integral.
  const Mat Sinv = mv.Sigma.inverse();
  const Vec xi = Sinv * mv.upsilon;
  const Vec phi_exact = Sinv * (res.ric.P.front() * (mv.x0 - xi)) + xi;
  CHECK((res.phi_form->phi - phi_exact).norm() <= 1e-10);
  CHECK((cf.phi - phi_exact).norm() <= 1e-12);
}

TEST_CASE("the dual grid search never beats the analytic maximum") {
  const ProblemSpec spec = normalize(random_instance(92, {.n = 2, .m = 2}));
  SolveOptions sopt;
  sopt.quad_refine = true;
  const SolveResult res = check_pipeline(spec, sopt);
  TestRng rng(93);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec d = rng.vec(2, 2.0);
    const double V = constrained_value(res.psi_form, res.normalized.cost.Gbar,
                                       res.normalized.cost.zeta, d);
    // Coarse-to-fine lambda grid around the stationary point.
    Vec center = sym_solve(res.psi_form.Psi, Vec(res.psi_form.psi - d));
    double radius = 2.0 * (1.0 + center.norm());
    double best = -std::numeric_limits<double>::infinity();
    for (int refine = 0; refine < 4; ++refine) {
      Vec arg = center;
      for (int i = -4; i <= 4; ++i) {
        for (int j = -4; j <= 4; ++j) {
          Vec lambda = center;
          lambda(0) += radius * i / 4.0;
          lambda(1) += radius * j / 4.0;
          const double v =
              dual_value(res.psi_form, res.normalized.cost.Gbar,
                         res.normalized.cost.zeta, d, lambda);
          if (v > best) {
            best = v;
            arg = lambda;
          }
        }
      }
      center = arg;
      radius /= 4.0;
    }
    CHECK(best <= V + 1e-9 * (1.0 + std::fabs(V)));
    CHECK(V - best <= 1e-4 * (1.0 + std::fabs(V)));
  }
}

TEST_CASE("cost rescaling moves the value but not the target") {
  const ProblemSpec base = normalize(random_instance(94, {.n = 2, .m = 2}));
  ProblemSpec scaled_raw = base;
  const double c = 2.0;
  for (Mat& q : scaled_raw.cost.Q.cells()) q *= c;
  for (Mat& r : scaled_raw.cost.R.cells()) r *= c;
  scaled_raw.cost.G *= c;
  scaled_raw.cost.Gbar *= c;
  const ProblemSpec scaled = normalize(scaled_raw);

  SolveOptions sopt;
  sopt.quad_refine = true;
  const SolveResult r1 = check_pipeline(base, sopt);
  const SolveResult r2 = check_pipeline(scaled, sopt);
  REQUIRE(r1.verdicts.solvable());
  REQUIRE(r2.verdicts.solvable());
  const DualOptimum o1 =
      optimize(r1.normalized, r1.psi_form, r1.phi_form, r1.verdicts);
  const DualOptimum o2 =
      optimize(r2.normalized, r2.psi_form, r2.phi_form, r2.verdicts);
  CHECK((o1.d_star - o2.d_star).norm() <= 1e-9 * (1.0 + o1.d_star.norm()));
  CHECK((c * o1.lambda_star - o2.lambda_star).norm() <=
        1e-9 * (1.0 + o2.lambda_star.norm()));
  CHECK(o2.value_psi ==
        doctest::Approx(c * o1.value_psi).epsilon(1e-9));
}

TEST_CASE("a singular terminal weight falls back to the first route") {
  // G = 0 stays in the standard case but removes the K transformation;
  // the pipeline must still certify and optimize through Psi alone.
  ProblemSpec s = scalar_standard_spec();
  s.cost.G = Mat::Zero(1, 1);
  const SolveResult res = solve_pipeline(normalize(s));
  CHECK_FALSE(res.aux.K_available);
  CHECK_FALSE(res.phi_form.has_value());
  CHECK_FALSE(res.verdicts.phi_route_available);
  CHECK(res.verdicts.type1);  // Gbar = 0 and Psi positive definite
  CHECK(res.optimum.has_value());
  CHECK_FALSE(res.optimum->value_phi_available);
  CHECK(res.optimum->d_star.allFinite());
  CHECK_THROWS_AS((void)consistency_check(res.ric, res.aux), Error);
}

TEST_CASE("a hopeless mean-field penalty is reported unsolvable") {
  ProblemSpec spec = normalize(random_instance(95, {.n = 2, .m = 2}));
  spec.cost.Gbar = -1e6 * Mat::Identity(2, 2);
  const SolveResult res = check_pipeline(spec);
  CHECK_FALSE(res.verdicts.solvable());
  CHECK_THROWS_AS((void)optimize(res.normalized, res.psi_form, res.phi_form,
                                 res.verdicts),
                  Error);
}

TEST_SUITE_END();
