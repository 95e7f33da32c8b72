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

#include "slqmf/solver.hpp"

#include <sstream>

namespace slqmf {

SolveResult check_pipeline(const ProblemSpec& spec, const SolveOptions& opt) {
  SolveResult res;
  res.tag = validate(spec);
  if (!res.tag.covered()) {
    throw Error(ErrorCode::kCaseNotCovered,
                "neither the standard nor the singular assumptions hold");
  }
  res.normalized = normalize(spec);
  res.feas = feasibility(res.normalized, opt.substeps);
  res.ric = integrate(res.normalized, opt.substeps);
  res.positivity = check_uniform_positivity(res.ric, res.normalized, res.tag);
  res.aux = solve_auxiliary(res.normalized, res.ric);
  res.psi_form = compute_psi(res.normalized, res.ric, res.aux, opt.quad_refine);
  if (res.aux.K_available) {
    res.phi_form =
        compute_phi(res.normalized, res.ric, res.aux, opt.quad_refine);
    res.consistency = consistency_check(res.ric, res.aux);
  }
  res.verdicts = solvability(res.psi_form, res.phi_form,
                             res.normalized.cost.G, res.normalized.cost.Gbar);
  return res;
}

SolveResult solve_pipeline(const ProblemSpec& spec, const SolveOptions& opt) {
  SolveResult res = check_pipeline(spec, opt);
  if (!res.feas.feasible_for_all_d) {
    std::ostringstream msg;
    msg << "integral_norm=" << res.feas.integral_norm;
    throw Error(ErrorCode::kInfeasible, msg.str());
  }
  res.optimum =
      optimize(res.normalized, res.psi_form, res.phi_form, res.verdicts);
  res.feedback = make_feedback(res.normalized, res.ric, res.aux,
                               res.optimum->lambda_star);
  return res;
}

}  // namespace slqmf
