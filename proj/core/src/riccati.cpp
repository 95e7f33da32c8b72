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

#include "slqmf/riccati.hpp"

#include <algorithm>
#include <cmath>

namespace slqmf {

Mat feedback_gain(const Mat& P, const Mat& B, const Mat& C, const Mat& D,
                  const Mat& R, double* cond_out) {
  const Mat N = symmetrize(D.transpose() * P * D + R);
  Eigen::SelfAdjointEigenSolver<Mat> es(N);
  const double lo = es.eigenvalues().minCoeff();
  if (lo < kGainTol) {
    throw Error(ErrorCode::kNearSingularGain,
                "lambda_min(D^T P D + R) = " + std::to_string(lo));
  }
  if (cond_out != nullptr) {
    *cond_out = es.eigenvalues().maxCoeff() / lo;
  }
  const Mat rhs = B.transpose() * P + D.transpose() * P * C;
  return -es.eigenvectors() *
         es.eigenvalues().cwiseInverse().asDiagonal() *
         (es.eigenvectors().transpose() * rhs);
}

Mat riccati_generator(const Mat& P, const Mat& A, const Mat& B, const Mat& C,
                      const Mat& D, const Mat& Q, const Mat& R, Mat* theta_out,
                      double* cond_out) {
  const Mat theta = feedback_gain(P, B, C, D, R, cond_out);
  if (theta_out != nullptr) *theta_out = theta;
  const Mat N = symmetrize(D.transpose() * P * D + R);
  Mat g = -theta.transpose() * N * theta;
  g += P * A + A.transpose() * P + C.transpose() * P * C + Q;
  return symmetrize(g);
}

namespace {

struct CellCoeffs {
  const Mat* A;
  const Mat* B;
  const Mat* C;
  const Mat* D;
  const Mat* Q;
  const Mat* R;
};

CellCoeffs coeffs_at(const ProblemSpec& spec, int cell) {
  return {&spec.dyn.A.at_cell(cell), &spec.dyn.B.at_cell(cell),
          &spec.dyn.C.at_cell(cell), &spec.dyn.D.at_cell(cell),
          &spec.cost.Q.at_cell(cell), &spec.cost.R.at_cell(cell)};
}

}  // namespace

RiccatiSolution integrate(const ProblemSpec& spec, int substeps) {
  if (substeps < 1) {
    throw Error(ErrorCode::kInvalidArgument, "substeps must be positive");
  }
  const CaseTag tag = validate(spec);
  if (!tag.covered()) {
    throw Error(ErrorCode::kCaseNotCovered,
                "neither assumption set holds; refusing to integrate");
  }

  RiccatiSolution sol;
  sol.grid = spec.grid;
  sol.substeps = substeps;
  const int n_steps = spec.grid.n_steps();
  sol.P_fine.resize(static_cast<size_t>(sol.n_fine()));

  double max_cond = 0.0;
  auto rhs = [&](const Mat& P, const CellCoeffs& c) {
    double cond = 0.0;
    const Mat g = riccati_generator(P, *c.A, *c.B, *c.C, *c.D, *c.Q, *c.R,
                                    nullptr, &cond);
    max_cond = std::max(max_cond, cond);
    return Mat(-g);  // dP/dt = -g1
  };

  const double h = -sol.fine_dt();  // backward in time
  Mat P = symmetrize(spec.cost.G);
  sol.P_fine.back() = P;

  for (int cell = n_steps - 1; cell >= 0; --cell) {
    const CellCoeffs c = coeffs_at(spec, cell);
    for (int sub = substeps - 1; sub >= 0; --sub) {
      const Mat k1 = rhs(P, c);
      const Mat k2 = rhs(symmetrize(P + 0.5 * h * k1), c);
      const Mat k3 = rhs(symmetrize(P + 0.5 * h * k2), c);
      const Mat k4 = rhs(symmetrize(P + h * k3), c);
      P = symmetrize(P + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
      if (!(P.norm() < kBlowUpNorm)) {
        throw Error(ErrorCode::kBlowUp, "Riccati solution norm exceeds 1e12");
      }
      sol.P_fine[static_cast<size_t>(sol.fine_index(cell, sub))] = P;
    }
  }

  sol.P.resize(static_cast<size_t>(n_steps) + 1);
  sol.Theta.resize(sol.P.size());
  sol.Ahat.resize(sol.P.size());
  sol.Chat.resize(sol.P.size());
  sol.min_eig_P = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n_steps; ++k) {
    const Mat& Pk = sol.P_fine[static_cast<size_t>(k * substeps)];
    const int cell = spec.grid.cell_of_node(k);
    const CellCoeffs c = coeffs_at(spec, cell);
    double cond = 0.0;
    const Mat theta = feedback_gain(Pk, *c.B, *c.C, *c.D, *c.R, &cond);
    max_cond = std::max(max_cond, cond);
    sol.P[static_cast<size_t>(k)] = Pk;
    sol.Theta[static_cast<size_t>(k)] = theta;
    sol.Ahat[static_cast<size_t>(k)] = *c.A + *c.B * theta;
    sol.Chat[static_cast<size_t>(k)] = *c.C + *c.D * theta;
    sol.min_eig_P = std::min(sol.min_eig_P, min_eig(Pk));
  }
  sol.max_cond_gain = max_cond;
  return sol;
}

Mat riccati_midpoint(const ProblemSpec& spec, const RiccatiSolution& sol,
                     int cell, int sub) {
  const CellCoeffs c = coeffs_at(spec, cell);
  const Mat& Pl = sol.P_fine[static_cast<size_t>(sol.fine_index(cell, sub))];
  const Mat& Pr =
      sol.P_fine[static_cast<size_t>(sol.fine_index(cell, sub) + 1)];
  const Mat Fl =
      -riccati_generator(Pl, *c.A, *c.B, *c.C, *c.D, *c.Q, *c.R);
  const Mat Fr =
      -riccati_generator(Pr, *c.A, *c.B, *c.C, *c.D, *c.Q, *c.R);
  const double h = sol.fine_dt();
  return symmetrize(0.5 * (Pl + Pr) + (h / 8.0) * (Fl - Fr));
}

PositivityReport check_uniform_positivity(const RiccatiSolution& sol,
                                          const ProblemSpec& spec,
                                          const CaseTag& tag) {
  PositivityReport rep;
  rep.min_eig_P = sol.min_eig_P;

  double alpha = 0.0;
  double beta = 0.0;
  const int cells = spec.grid.n_steps();
  for (int k = 0; k < cells; ++k) {
    const double nb = spec.dyn.B.at_cell(k).norm();
    const double nd = spec.dyn.D.at_cell(k).norm();
    const double na = spec.dyn.A.at_cell(k).norm();
    const double nc = spec.dyn.C.at_cell(k).norm();
    alpha = std::max(alpha, nb * nb + nd * nd);
    beta = std::max(beta, 1.0 + 2.0 * na + nc * nc);
  }
  rep.alpha = alpha;
  rep.beta = beta;
  rep.delta = std::min(tag.delta_G, tag.delta_R);
  rep.bound_applies = tag.standard() && tag.delta_G > kPsdTol;
  rep.analytic_bound =
      rep.bound_applies
          ? rep.delta * std::exp(-beta * spec.grid.horizon()) /
                std::max(1.0, alpha)
          : 0.0;

  if (tag.delta_G > kPsdTol) {
    const double required = std::max(0.0, rep.analytic_bound);
    if (rep.min_eig_P < required - 1e-8) {
      throw Error(ErrorCode::kPositivityViolated,
                  "min_eig_P = " + std::to_string(rep.min_eig_P) +
                      " below bound " + std::to_string(required));
    }
  }
  return rep;
}

}  // namespace slqmf
