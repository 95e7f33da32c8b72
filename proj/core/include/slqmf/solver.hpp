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

#include "slqmf/duality.hpp"

namespace slqmf {

struct SolveOptions {
  int substeps = kDefaultSubsteps;
  bool quad_refine = false;
};

/// Everything the pipeline produces for one instance, in solve order.
struct SolveResult {
  ProblemSpec normalized;
  CaseTag tag;
  FeasibilityCertificate feas;
  RiccatiSolution ric;
  PositivityReport positivity;
  AuxiliarySolution aux;
  PsiForm psi_form;
  std::optional<PhiForm> phi_form;  ///< absent when G is singular
  SolvabilityVerdicts verdicts;
  double consistency = 0.0;  ///< max |P K - H|; 0 when K unavailable
  std::optional<DualOptimum> optimum;
  std::optional<FeedbackLaw> feedback;

  /// Optimal value shifted back to the unnormalized cost scale.
  double value_unnormalized() const {
    return optimum->value_psi + normalized.cost.cost_shift;
  }
};

/// validate -> normalize -> feasibility -> Riccati -> auxiliary -> dual
/// forms -> solvability. Refuses uncovered cases; reports infeasibility
/// without failing.
SolveResult check_pipeline(const ProblemSpec& spec, const SolveOptions& opt = {});

/// check_pipeline plus the dual optimization and feedback synthesis.
/// Throws kInfeasible when the reachability integral vanishes and
/// kUnsolvable when no sufficient condition holds.
SolveResult solve_pipeline(const ProblemSpec& spec, const SolveOptions& opt = {});

}  // namespace slqmf
