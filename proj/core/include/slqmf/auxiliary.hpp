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

/// Solutions of the linear backward vector systems attached to the Riccati
/// flow. The n+1 columns of H stack the non-homogeneous solution H^0
/// (terminal -G xi) and the homogeneous solutions H^i (terminal e_i);
/// K stacks K^0 (terminal -xi) and K^i (terminal G^{-1} e_i). They are
/// related by H = P K.
///
/// Generators (backward ODEs dM/dt = -g(M)):
///   H:  g = Ahat^T H + r_H,             r_H = Chat^T P b + P a - Q q
///   K:  g = (-A - P^{-1}Q - P^{-1}S C) K + r_K,
///       r_K = a + P^{-1} S b - P^{-1} Q q,   S = Chat^T P
/// with r_H, r_K applied to column 0 only.
struct AuxiliarySolution {
  TimeGrid grid;
  int substeps = kDefaultSubsteps;

  std::vector<Mat> H;       ///< nodes, n x (n+1)
  std::vector<Mat> K;       ///< nodes, n x (n+1); empty if K unavailable
  std::vector<Mat> H_fine;  ///< substep endpoints
  std::vector<Mat> K_fine;
  std::vector<Mat> S;        ///< nodes, S = Chat^T P
  std::vector<Mat> Rscript;  ///< nodes, P - P D (D^T P D + R)^{-1} D^T P
  std::vector<Vec> u0;       ///< nodes, offset control for lambda = 0
  bool K_available = false;

  Vec H0_node(int k) const { return H[static_cast<size_t>(k)].col(0); }
};

/// Integrates the H system backward with the same substep layout as the
/// Riccati solution (stage values of P come from cubic interpolation).
void solve_H_system(const ProblemSpec& spec, const RiccatiSolution& ric,
                    AuxiliarySolution& aux);

/// Single solve of the full non-homogeneous H equation for an arbitrary
/// terminal vector; by linearity it equals H^0 + sum_i terminal_i H^i when
/// the terminal is -G xi + sum_i terminal_i e_i.
std::vector<Vec> solve_H_direct(const ProblemSpec& spec,
                                const RiccatiSolution& ric,
                                const Vec& terminal);

/// Integrates the K system backward. Requires P positive definite on the
/// grid and G invertible.
void solve_K_system(const ProblemSpec& spec, const RiccatiSolution& ric,
                    AuxiliarySolution& aux);

/// Solves both systems and tabulates S, Rscript and the lambda-free offset
/// control. If G is singular the K system is skipped (K_available = false).
AuxiliarySolution solve_auxiliary(const ProblemSpec& spec,
                                  const RiccatiSolution& ric);

/// max over nodes and columns of |P K^i - H^i|; zero in exact arithmetic.
double consistency_check(const RiccatiSolution& ric,
                         const AuxiliarySolution& aux);

/// Offset control u0(t) = -(D^T P D + R)^{-1} (B^T H + D^T P b) at the
/// nodes, with H assembled for the given multiplier:
/// H = H^0 + sum_i lambda_i H^i.
std::vector<Vec> offset_control(const ProblemSpec& spec,
                                const RiccatiSolution& ric,
                                const AuxiliarySolution& aux,
                                const Vec& lambda);

/// Same offset computed through the K route,
/// u1 = -(D^T P D + R)^{-1} (B^T P K + D^T P b) with K = K^0 + sum lambda_i
/// K^i; equals offset_control up to integration error.
std::vector<Vec> offset_control_k_route(const ProblemSpec& spec,
                                        const RiccatiSolution& ric,
                                        const AuxiliarySolution& aux,
                                        const Vec& lambda);

}  // namespace slqmf
