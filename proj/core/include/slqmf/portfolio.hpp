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

#pragma once

#include <vector>

#include "slqmf/riccati.hpp"

namespace slqmf {

/// Multi-asset mean-variance market: n accounts, each invested in one risky
/// asset with appreciation rate mu_i and volatility sigma_i driven by a
/// common Brownian motion. The investor maximizes
///   E<2 upsilon, X(T)> - E<Sigma (X(T)-E[X(T)]), X(T)-E[X(T)]>
/// over investment amounts pi.
struct MVModel {
  Vec mu;
  Vec sigma;
  Vec upsilon;
  Vec x0;
  Mat Sigma;
  double horizon = 1.0;
  int steps = 500;

  int dim() const { return static_cast<int>(mu.size()); }
};

/// Maps the market into the generic control problem: A = a = C = b = 0,
/// B = diag(mu), D = diag(sigma), Q = q = R = p = eta = 0, G = Sigma,
/// Gbar = -Sigma, xi = Sigma^{-1} upsilon. Minimizing the generic cost
/// minimizes the negated objective, so the achieved objective is the
/// negated optimal value. The returned spec is normalized.
ProblemSpec build_mv_spec(const MVModel& mv);

/// The three-asset example market: equity, bond, commodity.
/// mu = (0.08, 0.03, 0.05), sigma = (0.20, 0.05, 0.25), upsilon =
/// (1.5, 1.0, 0.5), x0 = (15, 10, 5), benchmark Sigma with -0.5
/// off-diagonals, T = 1. Pass use_printed_sigma3 = true to take the third
/// volatility as 0.30 instead of 0.25.
MVModel example_market(bool use_printed_sigma3 = false);

/// The market's initially displayed risk-aversion matrix (0.6 / -0.3
/// off-diagonal variant), before the benchmark choice.
Mat example_sigma_initial();

/// Closed-form solution of the mapped problem in terms of P(0). PhiS is the
/// shifted dual Hessian Sigma^{-1} P(0) Sigma^{-1} - Sigma^{-1} (negative
/// definite), which equals the generic pipeline's Phi - G^{-1}.
///
/// value_display is the negated optimal cost of the mapped problem,
///   <(-Sigma-PhiS^{-1})^{-1} PhiS^{-1} phi, PhiS^{-1} phi>
///   + <PhiS^{-1} phi, phi> - <P(0)(x-xi), x-xi>;
/// the achieved utility of the preference functional adds the target
/// constant: objective = <upsilon, Sigma^{-1} upsilon> + value_display.
/// The constant moves with Sigma, and only the utility falls monotonically
/// as diagonal risk aversion grows.
struct MVClosedForm {
  Mat PhiS;
  Vec phi;
  Vec d_star;
  Vec lambda_star;       ///< multiplier at d_star
  double value_display;  ///< negated optimal cost of the mapped problem
  double objective;      ///< achieved mean-variance utility
  bool predicate;        ///< -Sigma - PhiS^{-1} > 0 (solvability)
};

MVClosedForm closed_form_value(const MVModel& mv, const Mat& P0);

/// One Riccati solve + closed form; convenience for sweeps.
double mv_objective(const MVModel& mv, int substeps = kDefaultSubsteps);

struct SweepPoint {
  double value = 0.0;      ///< the swept entry
  double objective = 0.0;  ///< meaningful when not skipped
  bool solvable = false;
  bool skipped = false;    ///< Sigma not positive definite at this value
};

struct SweepResult {
  int row = 0;
  int col = 0;
  std::vector<SweepPoint> points;
  int skipped_count = 0;
  bool monotone_decreasing = false;  ///< strict, over non-skipped points
  bool interior_minimum = false;     ///< argmin strictly inside the range
};

/// Varies Sigma(row,col) over the given values (co-updating the symmetric
/// entry), evaluating the closed-form objective at each positive definite
/// point. Points that break positive definiteness are flagged and skipped.
SweepResult sweep(const MVModel& mv, int row, int col,
                  const std::vector<double>& values,
                  int substeps = kDefaultSubsteps);

std::vector<double> linspace(double from, double to, int points);

/// Central-difference sensitivities of the objective to the diagonal
/// entries of Sigma, reported for the figure narrative (not asserted).
struct DiagonalSensitivity {
  double d11 = 0.0;
  double d22 = 0.0;
  double d33 = 0.0;
};

DiagonalSensitivity diagonal_sensitivity(const MVModel& mv, double h = 1e-3,
                                         int substeps = kDefaultSubsteps);

}  // namespace slqmf
