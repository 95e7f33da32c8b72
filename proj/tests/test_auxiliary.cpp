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

TEST_SUITE_BEGIN("auxiliary");

TEST_CASE("zero data gives a zero non-homogeneous solution") {
  const ProblemSpec spec = normalize(
      random_instance(50, {.n = 3, .m = 2, .with_data = false}));
  const RiccatiSolution ric = integrate(spec);
  const AuxiliarySolution aux = solve_auxiliary(spec, ric);
  for (const Mat& H : aux.H) CHECK(H.col(0).norm() == doctest::Approx(0.0));
  for (const Mat& K : aux.K) CHECK(K.col(0).norm() == doctest::Approx(0.0));
}

TEST_CASE("homogeneous columns stay at the basis when the closed loop is frozen") {
  // B = 0 and A = 0 make Ahat vanish, so H^i(t) = e_i everywhere.
  TestRng rng(51);
  ProblemSpec s = zero_data_spec(3, 2, rng.pd(3));
  s.dyn.C = MatrixPath::constant(rng.mat(3, 3, 0.5));
  const RiccatiSolution ric = integrate(s);
  AuxiliarySolution aux;
  aux.grid = s.grid;
  aux.substeps = ric.substeps;
  solve_H_system(s, ric, aux);
  for (const Mat& H : aux.H) {
    CHECK((H.rightCols(3) - Mat::Identity(3, 3)).norm() < 1e-12);
  }
}

TEST_CASE("non-homogeneous solution matches an independent quadrature") {
  // Scalar standard case driven by a = 1: H0(0) = int_0^T Phi(0,s) P(s) ds
  // with Phi the closed-loop transition. The oracle integrates on a grid
  // ten times finer than the solver's.
  ProblemSpec spec = scalar_standard_spec();
  spec.dyn.a = VectorPath::constant(Vec::Ones(1));
  const RiccatiSolution ric = integrate(spec);
  AuxiliarySolution aux;
  solve_H_system(spec, ric, aux);

  const int fine_steps = 10 * spec.grid.n_steps();
  ProblemSpec fine_spec = spec;
  fine_spec.grid = TimeGrid(1.0, fine_steps);
  const RiccatiSolution fine = integrate(fine_spec);
  // Ahat = A + B Theta = -P/(P+1); Phi(0,s) = exp(int_0^s Ahat), both
  // accumulated by trapezoid on the fine grid.
  const double h = fine_spec.grid.dt();
  double cum = 0.0;
  double integral = 0.0;
  double f_prev = 0.0;
  double ahat_prev = 0.0;
  for (int k = 0; k <= fine_steps; ++k) {
    const double P = fine.P[static_cast<size_t>(k)](0, 0);
    const double ahat = -P / (P + 1.0);
    if (k > 0) cum += 0.5 * h * (ahat_prev + ahat);
    const double f = std::exp(cum) * P;
    if (k > 0) integral += 0.5 * h * (f_prev + f);
    f_prev = f;
    ahat_prev = ahat;
  }
  CHECK(aux.H.front()(0, 0) == doctest::Approx(integral).epsilon(1e-6));
}

TEST_CASE("example market keeps K constant in time") {
  const ProblemSpec spec = build_mv_spec(example_market());
  const RiccatiSolution ric = integrate(spec);
  const AuxiliarySolution aux = solve_auxiliary(spec, ric);
  REQUIRE(aux.K_available);
  double dev = 0.0;
  for (const Mat& K : aux.K) dev = std::max(dev, (K - aux.K.back()).norm());
  CHECK(dev <= 1e-10);
  // Terminals: K^0 = -xi, K^i = Sigma^{-1} e_i.
  CHECK((aux.K.back().col(0) + spec.cost.xi).norm() == doctest::Approx(0.0));
  const Mat Sinv = spec.cost.G.inverse();
  CHECK((aux.K.back().rightCols(3) - Sinv).norm() < 1e-12);
}

TEST_CASE("drift-free data keeps K0 at zero") {
  TestRng rng(52);
  ProblemSpec s = zero_data_spec(2, 2, rng.pd(2));
  s.dyn.B = MatrixPath::constant(rng.mat(2, 2));
  const RiccatiSolution ric = integrate(s);
  const AuxiliarySolution aux = solve_auxiliary(s, ric);
  for (const Mat& K : aux.K) CHECK(K.col(0).norm() == doctest::Approx(0.0));
}

TEST_CASE("transformation consistency: P K = H at every node") {
  const ProblemSpec spec =
      normalize(random_instance(53, {.n = 2, .m = 2, .piecewise = true}));
  const RiccatiSolution ric = integrate(spec);
  const AuxiliarySolution aux = solve_auxiliary(spec, ric);
  CHECK(consistency_check(ric, aux) < 1e-7);
}

TEST_CASE("superposition of the multiplier decomposition") {
  const ProblemSpec spec = normalize(random_instance(54, {.n = 3, .m = 2}));
  const RiccatiSolution ric = integrate(spec);
  const AuxiliarySolution aux = solve_auxiliary(spec, ric);
  TestRng rng(55);
  const Vec lambda = rng.vec(3);
  const Vec terminal = lambda - spec.cost.G * spec.cost.xi;
  const std::vector<Vec> direct = solve_H_direct(spec, ric, terminal);
  for (size_t k = 0; k < direct.size(); ++k) {
    const Vec combo = aux.H[k].col(0) + aux.H[k].rightCols(3) * lambda;
    CHECK((direct[k] - combo).norm() <= 1e-9 * (1.0 + combo.norm()));
  }
}

TEST_CASE("offset control agrees between the H and K routes") {
  const ProblemSpec spec = normalize(random_instance(56, {.n = 3, .m = 3}));
  const RiccatiSolution ric = integrate(spec);
  const AuxiliarySolution aux = solve_auxiliary(spec, ric);
  TestRng rng(57);
  const Vec lambda = rng.vec(3);
  const std::vector<Vec> u0 = offset_control(spec, ric, aux, lambda);
  const std::vector<Vec> u1 = offset_control_k_route(spec, ric, aux, lambda);
  double worst = 0.0;
  for (size_t k = 0; k < u0.size(); ++k) {
    worst = std::max(worst, (u0[k] - u1[k]).norm());
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("offset control formula cases") {
  const ProblemSpec spec = normalize(scalar_standard_spec());
  const RiccatiSolution ric = integrate(spec);
  AuxiliarySolution aux = solve_auxiliary(spec, ric);

  SUBCASE("no forcing, no offset") {
    const std::vector<Vec> u0 =
        offset_control(spec, ric, aux, Vec::Zero(1));
    for (const Vec& u : u0) CHECK(u.norm() == doctest::Approx(0.0));
  }
  SUBCASE("diffusion offset only") {
    // Inject H = 0 with b = 1: u0 = -(D^T P D + R)^{-1} D^T P b.
    ProblemSpec forced = spec;
    forced.dyn.b = VectorPath::constant(Vec::Ones(1));
    for (Mat& H : aux.H) H.setZero();
    const std::vector<Vec> u0 =
        offset_control(forced, ric, aux, Vec::Zero(1));
    for (size_t k = 0; k < u0.size(); ++k) {
      const double P = ric.P[k](0, 0);
      CHECK(u0[k](0) == doctest::Approx(-P / (P + 1.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("terminal data is exact for both systems") {
  const ProblemSpec spec = normalize(random_instance(58, {.n = 2, .m = 1}));
  const RiccatiSolution ric = integrate(spec);
  const AuxiliarySolution aux = solve_auxiliary(spec, ric);
  Mat Hterm(2, 3);
  Hterm.col(0) = -(spec.cost.G * spec.cost.xi);
  Hterm.rightCols(2) = Mat::Identity(2, 2);
  CHECK((aux.H.back() - Hterm).norm() == 0.0);
  Mat Kterm(2, 3);
  Kterm.col(0) = -spec.cost.xi;
  Kterm.rightCols(2) = spec.cost.G.inverse();
  CHECK((aux.K.back() - Kterm).norm() < 1e-13);
}

TEST_CASE("the control-weight reduction is positive semidefinite") {
  const ProblemSpec spec =
      normalize(random_instance(59, {.n = 3, .m = 2, .piecewise = true}));
  const RiccatiSolution ric = integrate(spec);
  const AuxiliarySolution aux = solve_auxiliary(spec, ric);
  for (const Mat& Rs : aux.Rscript) CHECK(min_eig(Rs) >= -1e-10);
}

TEST_SUITE_END();
