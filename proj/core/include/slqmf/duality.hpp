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

#include <optional>
#include <vector>

#include "slqmf/auxiliary.hpp"

namespace slqmf {

/// Reachability of arbitrary terminal means: with deterministic
/// coefficients the fundamental solution Y of dY/dt = -Y A, Y(T) = I,
/// must satisfy  int_0^T |Y B| dt > 0.
struct FeasibilityCertificate {
  std::vector<Mat> Y;  ///< nodes
  double integral_norm = 0.0;
  bool feasible_for_all_d = false;
};

FeasibilityCertificate feasibility(const ProblemSpec& spec,
                                   int substeps = kDefaultSubsteps);

/// Coefficients of the dual value in the multiplier lambda, H route:
///   V1(x,d,lambda) = -<Psi l, l> + 2<psi - d, l> + Delta
///                    + <Gbar d, d> - 2<zeta, d>.
struct PsiForm {
  Mat Psi;
  Vec psi;
  double Delta = 0.0;
};

/// Same value through the K route:
///   V1(x,d,lambda) = <(Phi - G^{-1}) l, l> + 2<phi - d, l> + delta
///                    + <Gbar d, d> - 2<zeta, d>,
/// so Psi = G^{-1} - Phi, psi = phi and Delta = delta identically.
struct PhiForm {
  Mat Phi;
  Vec phi;
  double delta = 0.0;
};

/// When quad_refine is false the time integrals use the composite trapezoid
/// rule on grid nodes; when true, on every Runge-Kutta substep endpoint.
PsiForm compute_psi(const ProblemSpec& spec, const RiccatiSolution& ric,
                    const AuxiliarySolution& aux, bool quad_refine = false);

PhiForm compute_phi(const ProblemSpec& spec, const RiccatiSolution& ric,
                    const AuxiliarySolution& aux, bool quad_refine = false);

struct SolvabilityVerdicts {
  bool type1 = false;  ///< Gbar + Psi^{-1} > 0
  bool type2 = false;  ///< Gbar - (Phi - G^{-1})^{-1} > 0
  bool cond1 = false;  ///< Gbar + G > 0
  bool cond2 = false;  ///< Phi > 0 and Gbar + G >= 0
  bool cond3 = false;  ///< Phi > 0 and Gbar + G^{1/2}(I - G^{1/2} Phi G^{1/2})^{-1} G^{1/2} > 0
  bool phi_route_available = false;
  double min_eig_Psi = 0.0;        ///< positive by theory
  double max_eig_Phi_shift = 0.0;  ///< lambda_max(Phi - G^{-1}), negative by theory
  bool solvable() const { return type1 || type2; }
};

/// Eigenvalue tests (threshold kPsdTol) of the two solvability conditions
/// and the three specific sufficient conditions for the second one. Phi may
/// be absent when G is singular. cond2/cond3 use the unshifted Phi, which
/// is PSD by construction.
SolvabilityVerdicts solvability(const PsiForm& psi_form,
                                const std::optional<PhiForm>& phi_form,
                                const Mat& G, const Mat& Gbar);

struct DualOptimum {
  Vec d_star;
  Vec lambda_star;
  double value_psi = 0.0;  ///< V(x, d*) assembled from the Psi route
  double value_phi = 0.0;  ///< same from the Phi route; equal within tolerance
  bool value_phi_available = false;
};

/// Minimizes V(x,d) = <Psi^{-1}(psi-d), psi-d> + Delta + <Gbar d, d>
/// - 2<zeta, d> over d:
///   d*      = (Gbar + Psi^{-1})^{-1} (Psi^{-1} psi + zeta),
///   lambda* = Psi^{-1} (psi - d*).
/// Throws kUnsolvable when no sufficient condition holds and
/// kSingularHessian when Gbar + Psi^{-1} is numerically singular.
DualOptimum optimize(const ProblemSpec& spec, const PsiForm& psi_form,
                     const std::optional<PhiForm>& phi_form,
                     const SolvabilityVerdicts& verdicts);

/// Dual value V1(x,d,lambda) from the Psi-route coefficients.
double dual_value(const PsiForm& f, const Mat& Gbar, const Vec& zeta,
                  const Vec& d, const Vec& lambda);

/// V(x,d) = max over lambda of dual_value.
double constrained_value(const PsiForm& f, const Mat& Gbar, const Vec& zeta,
                         const Vec& d);

/// Closed-loop control tabulated per grid cell (values held constant on
/// each cell): u(t, X) = Theta_cell X + u0_cell.
struct FeedbackLaw {
  std::vector<Mat> Theta_cell;
  std::vector<Vec> u0_cell;
};

FeedbackLaw make_feedback(const ProblemSpec& spec, const RiccatiSolution& ric,
                          const AuxiliarySolution& aux, const Vec& lambda);

}  // namespace slqmf
