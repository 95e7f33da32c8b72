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

#include "slqmf/problem.hpp"

namespace slqmf {

/// Gain denominators D^T P D + R whose smallest eigenvalue falls below this
/// abort the integration (the singular case left the solvable region).
inline constexpr double kGainTol = 1e-12;

/// Frobenius norm beyond which the Riccati integration is declared blown up.
inline constexpr double kBlowUpNorm = 1e12;

inline constexpr int kDefaultSubsteps = 8;

/// Feedback gain Theta(P) = -(D^T P D + R)^{-1} (B^T P + D^T P C).
/// Throws kNearSingularGain when the denominator is near singular.
Mat feedback_gain(const Mat& P, const Mat& B, const Mat& C, const Mat& D,
                  const Mat& R, double* cond_out = nullptr);

/// Quadratic generator of the backward Riccati equation; P solves
///   dP/dt = -g1(P),  P(T) = G,
/// with
///   g1(P) = -Theta^T (D^T P D + R) Theta + P A + A^T P + C^T P C + Q.
/// The returned matrix is symmetrized.
Mat riccati_generator(const Mat& P, const Mat& A, const Mat& B, const Mat& C,
                      const Mat& D, const Mat& Q, const Mat& R,
                      Mat* theta_out = nullptr, double* cond_out = nullptr);

/// Backward solution of the Riccati equation on the grid, plus derived
/// closed-loop quantities. Node arrays are in forward time order
/// (index 0 = t=0, index n_steps = T); fine arrays hold every Runge-Kutta
/// substep endpoint, n_steps*substeps + 1 entries.
struct RiccatiSolution {
  TimeGrid grid;
  int substeps = kDefaultSubsteps;

  std::vector<Mat> P;      ///< nodes; P.back() == G exactly
  std::vector<Mat> Theta;  ///< nodes, gain with the owning cell's coefficients
  std::vector<Mat> Ahat;   ///< nodes, A + B Theta
  std::vector<Mat> Chat;   ///< nodes, C + D Theta
  std::vector<Mat> P_fine;

  double min_eig_P = 0.0;     ///< min over nodes of lambda_min(P)
  double max_cond_gain = 0.0; ///< max condition number of D^T P D + R seen

  double fine_dt() const { return grid.dt() / substeps; }
  int n_fine() const { return grid.n_steps() * substeps + 1; }
  int fine_index(int cell, int sub) const { return cell * substeps + sub; }
  const Mat& P_node(int k) const { return P[static_cast<size_t>(k)]; }
};

/// Integrates the Riccati equation backward from P(T) = G with classical
/// four-stage Runge-Kutta, `substeps` steps per grid cell, symmetrizing
/// after every stage. Requires a covered case tag.
RiccatiSolution integrate(const ProblemSpec& spec,
                          int substeps = kDefaultSubsteps);

/// Cubic-Hermite value of P at the midpoint of fine interval
/// [fine_index(cell,sub), fine_index(cell,sub)+1], using derivative values
/// from the owning cell's coefficients.
Mat riccati_midpoint(const ProblemSpec& spec, const RiccatiSolution& sol,
                     int cell, int sub);

struct PositivityReport {
  double min_eig_P = 0.0;
  double analytic_bound = 0.0;  ///< delta * exp(-beta T) / max(1, alpha)
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  bool bound_applies = false;   ///< standard case with G positive definite
};

/// Compares min_eig_P against a coercivity lower bound computed from
/// coefficient sup-norms. The bound is conservative; a violation indicates
/// an integration bug, not a property of the instance.
///
/// Constants used (Frobenius norms, sup over cells):
///   2<AX,X> + 2<Bu,X> + |CX+Du|^2
///     >= -2|A||X|^2 - (|B|^2|u|^2 + |X|^2) - |C|^2|X|^2
/// via 2ab <= a^2 + b^2 and |CX+Du|^2 >= -|C|^2|X|^2 (discarding the
/// nonnegative remainder), so
///   alpha = sup(|B|^2 + |D|^2)   (|D|^2 added for slack; only weakens)
///   beta  = sup(1 + 2|A| + |C|^2)
///   delta = min(lambda_min(G), inf_t lambda_min(R)).
PositivityReport check_uniform_positivity(const RiccatiSolution& sol,
                                          const ProblemSpec& spec,
                                          const CaseTag& tag);

}  // namespace slqmf
