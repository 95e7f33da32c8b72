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

#include "slqmf/duality.hpp"

#include <cmath>

namespace slqmf {

namespace {

/// Cell-by-cell quadrature over [0,T]; coefficient jumps at cell boundaries
/// never straddle a quadrature interval. Default: trapezoid on the cell
/// endpoints. Refined: composite Simpson on the Runge-Kutta substep
/// endpoints (trapezoid there when the substep count is odd). The visitor
/// is called as f(cell, fine_index, weight).
template <typename F>
void trapezoid_cells(const TimeGrid& grid, int substeps, bool refine, F&& f) {
  const int cells = grid.n_steps();
  for (int cell = 0; cell < cells; ++cell) {
    if (refine) {
      const double h = grid.dt() / substeps;
      if (substeps % 2 == 0) {
        for (int sub = 0; sub <= substeps; ++sub) {
          const double w = (sub == 0 || sub == substeps) ? h / 3.0
                           : (sub % 2 == 1)              ? 4.0 * h / 3.0
                                                         : 2.0 * h / 3.0;
          f(cell, cell * substeps + sub, w);
        }
      } else {
        for (int sub = 0; sub <= substeps; ++sub) {
          const double w = (sub == 0 || sub == substeps) ? 0.5 * h : h;
          f(cell, cell * substeps + sub, w);
        }
      }
    } else {
      const double w = 0.5 * grid.dt();
      f(cell, cell * substeps, w);
      f(cell, (cell + 1) * substeps, w);
    }
  }
}

}  // namespace

FeasibilityCertificate feasibility(const ProblemSpec& spec, int substeps) {
  const int n = spec.dyn.n;
  const int n_steps = spec.grid.n_steps();
  const double h = -spec.grid.dt() / substeps;

  FeasibilityCertificate cert;
  std::vector<Mat> fine(static_cast<size_t>(n_steps * substeps) + 1);
  Mat Y = Mat::Identity(n, n);
  fine.back() = Y;
  for (int cell = n_steps - 1; cell >= 0; --cell) {
    const Mat& A = spec.dyn.A.at_cell(cell);
    for (int sub = substeps - 1; sub >= 0; --sub) {
      const Mat k1 = -Y * A;
      const Mat k2 = -(Y + 0.5 * h * k1) * A;
      const Mat k3 = -(Y + 0.5 * h * k2) * A;
      const Mat k4 = -(Y + h * k3) * A;
      Y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      fine[static_cast<size_t>(cell * substeps + sub)] = Y;
    }
  }

  cert.Y.resize(static_cast<size_t>(n_steps) + 1);
  for (int k = 0; k <= n_steps; ++k) {
    cert.Y[static_cast<size_t>(k)] = fine[static_cast<size_t>(k * substeps)];
  }

  // Z = 0 for deterministic coefficients, so the integrand is |Y B|_F.
  double integral = 0.0;
  trapezoid_cells(spec.grid, substeps, /*refine=*/false,
                  [&](int cell, int idx, double w) {
                    const Mat& Yk = fine[static_cast<size_t>(idx)];
                    integral += w * (Yk * spec.dyn.B.at_cell(cell)).norm();
                  });
  cert.integral_norm = integral;
  cert.feasible_for_all_d = integral > 1e-10;
  return cert;
}

PsiForm compute_psi(const ProblemSpec& spec, const RiccatiSolution& ric,
                    const AuxiliarySolution& aux, bool quad_refine) {
  const int n = spec.dyn.n;
  PsiForm out;
  out.Psi = Mat::Zero(n, n);
  out.psi = Vec::Zero(n);
  out.Delta = 0.0;

  trapezoid_cells(
      spec.grid, ric.substeps, quad_refine, [&](int cell, int idx, double w) {
        const Mat& P = ric.P_fine[static_cast<size_t>(idx)];
        const Mat& H = aux.H_fine[static_cast<size_t>(idx)];
        const Mat& B = spec.dyn.B.at_cell(cell);
        const Mat& D = spec.dyn.D.at_cell(cell);
        const Vec& a = spec.dyn.a.at_cell(cell);
        const Vec& b = spec.dyn.b.at_cell(cell);
        const Mat& Q = spec.cost.Q.at_cell(cell);
        const Vec& q = spec.cost.q.at_cell(cell);

        const Mat N =
            symmetrize(D.transpose() * P * D + spec.cost.R.at_cell(cell));
        if (min_eig(N) < kGainTol) {
          throw Error(ErrorCode::kNearSingularGain, "dual quadrature gain");
        }
        Eigen::LDLT<Mat> Nld(N);

        // w_i = B^T H^i (i >= 1); w_0 also carries the D^T P b offset.
        const Mat W = B.transpose() * H;
        const Vec w0 = W.col(0) + D.transpose() * (P * b);
        const Mat Z = Nld.solve(W.rightCols(n));  // N^{-1} w_i columns

        out.Psi.noalias() += w * (W.rightCols(n).transpose() * Z);
        out.psi.noalias() +=
            w * (H.rightCols(n).transpose() * a - Z.transpose() * w0);
        out.Delta += w * (q.dot(Q * q) + b.dot(P * b) +
                          2.0 * H.col(0).dot(a) - w0.dot(Nld.solve(w0)));
      });

  out.Psi = symmetrize(out.Psi);
  const Mat& H0 = aux.H.front();
  out.psi += H0.rightCols(n).transpose() * spec.x0;
  out.Delta += spec.x0.dot(ric.P.front() * spec.x0) +
               2.0 * H0.col(0).dot(spec.x0) +
               spec.cost.xi.dot(spec.cost.G * spec.cost.xi);
  return out;
}

PhiForm compute_phi(const ProblemSpec& spec, const RiccatiSolution& ric,
                    const AuxiliarySolution& aux, bool quad_refine) {
  if (!aux.K_available) {
    throw Error(ErrorCode::kSingularG, "K system was not solved");
  }
  const int n = spec.dyn.n;
  PhiForm out;
  out.Phi = Mat::Zero(n, n);
  out.phi = Vec::Zero(n);
  out.delta = 0.0;

  trapezoid_cells(
      spec.grid, ric.substeps, quad_refine, [&](int cell, int idx, double w) {
        const Mat& P = ric.P_fine[static_cast<size_t>(idx)];
        const Mat& K = aux.K_fine[static_cast<size_t>(idx)];
        const Mat& C = spec.dyn.C.at_cell(cell);
        const Mat& D = spec.dyn.D.at_cell(cell);
        const Vec& b = spec.dyn.b.at_cell(cell);
        const Mat& Q = spec.cost.Q.at_cell(cell);
        const Vec& q = spec.cost.q.at_cell(cell);

        const Mat N =
            symmetrize(D.transpose() * P * D + spec.cost.R.at_cell(cell));
        if (min_eig(N) < kGainTol) {
          throw Error(ErrorCode::kNearSingularGain, "dual quadrature gain");
        }
        const Mat Rs = symmetrize(
            P - P * D * Eigen::LDLT<Mat>(N).solve(D.transpose() * P));

        const Mat V = -C * K.rightCols(n);          // columns -C K^i
        const Vec v0 = -C * K.col(0) + b;           // -C K^0 + b
        const Mat QK = Q * K.rightCols(n);

        out.Phi.noalias() +=
            w * (V.transpose() * (Rs * V) + K.rightCols(n).transpose() * QK);
        out.phi.noalias() +=
            w * (V.transpose() * (Rs * v0) +
                 K.rightCols(n).transpose() * (Q * (K.col(0) + q)));
        out.delta += w * (v0.dot(Rs * v0) +
                          (K.col(0) + q).dot(Q * (K.col(0) + q)));
      });

  out.Phi = symmetrize(out.Phi);
  const Mat& K0 = aux.K.front();
  const Mat& P0 = ric.P.front();
  const Vec xK0 = spec.x0 + K0.col(0);
  out.Phi += symmetrize(K0.rightCols(n).transpose() * P0 * K0.rightCols(n));
  out.phi += K0.rightCols(n).transpose() * (P0 * xK0) + spec.cost.xi;
  out.delta += xK0.dot(P0 * xK0);
  return out;
}

SolvabilityVerdicts solvability(const PsiForm& psi_form,
                                const std::optional<PhiForm>& phi_form,
                                const Mat& G, const Mat& Gbar) {
  SolvabilityVerdicts v;
  v.min_eig_Psi = min_eig(psi_form.Psi);

  const Mat Psi_inv = sym_inverse(psi_form.Psi, "Psi");
  v.type1 = min_eig(symmetrize(Gbar + Psi_inv)) > kPsdTol;

  v.cond1 = min_eig(symmetrize(Gbar + G)) > kPsdTol;

  if (phi_form.has_value()) {
    v.phi_route_available = true;
    const Mat Ginv = sym_inverse(G, "G");
    const Mat shift = symmetrize(phi_form->Phi - Ginv);
    v.max_eig_Phi_shift = -min_eig(Mat(-shift));
    const Mat shift_inv = sym_inverse(shift, "Phi - G^{-1}");
    v.type2 = min_eig(symmetrize(Gbar - shift_inv)) > kPsdTol;

    const bool phi_pd = min_eig(phi_form->Phi) > kPsdTol;
    v.cond2 = phi_pd && min_eig(symmetrize(Gbar + G)) >= -kPsdTol;
    if (phi_pd) {
      const Mat Gh = sqrt_psd(G, "G");
      const Mat inner = symmetrize(Mat::Identity(G.rows(), G.cols()) -
                                   Gh * phi_form->Phi * Gh);
      if (min_eig(inner) > kPsdTol) {
        const Mat bound = Gh * sym_inverse(inner, "I - G^{1/2} Phi G^{1/2}") * Gh;
        v.cond3 = min_eig(symmetrize(Gbar + bound)) > kPsdTol;
      }
    }
  }
  return v;
}

double dual_value(const PsiForm& f, const Mat& Gbar, const Vec& zeta,
                  const Vec& d, const Vec& lambda) {
  return -lambda.dot(f.Psi * lambda) + 2.0 * (f.psi - d).dot(lambda) +
         f.Delta + d.dot(Gbar * d) - 2.0 * zeta.dot(d);
}

double constrained_value(const PsiForm& f, const Mat& Gbar, const Vec& zeta,
                         const Vec& d) {
  const Vec r = f.psi - d;
  return r.dot(sym_solve(f.Psi, r)) + f.Delta + d.dot(Gbar * d) -
         2.0 * zeta.dot(d);
}

DualOptimum optimize(const ProblemSpec& spec, const PsiForm& psi_form,
                     const std::optional<PhiForm>& phi_form,
                     const SolvabilityVerdicts& verdicts) {
  if (!verdicts.solvable()) {
    throw Error(ErrorCode::kUnsolvable,
                "no sufficient condition on Gbar holds");
  }
  if (!spec.cost.normalized) {
    throw Error(ErrorCode::kInvalidArgument, "optimize needs a normalized spec");
  }
  const Vec& zeta = spec.cost.zeta;
  const Mat& Gbar = spec.cost.Gbar;

  const Mat Psi_inv = sym_inverse(psi_form.Psi, "Psi");
  const Mat hess = symmetrize(Gbar + Psi_inv);
  if (min_eig(hess) < kPsdTol) {
    throw Error(ErrorCode::kSingularHessian,
                "Gbar + Psi^{-1} is numerically singular");
  }

  DualOptimum opt;
  opt.d_star = Eigen::LDLT<Mat>(hess).solve(Vec(Psi_inv * psi_form.psi + zeta));
  opt.lambda_star = sym_solve(psi_form.Psi, Vec(psi_form.psi - opt.d_star));
  opt.value_psi = constrained_value(psi_form, Gbar, zeta, opt.d_star);

  if (phi_form.has_value()) {
    const Mat Ginv = sym_inverse(spec.cost.G, "G");
    const Mat shift = symmetrize(phi_form->Phi - Ginv);
    const Vec r = phi_form->phi - opt.d_star;
    opt.value_phi = -r.dot(sym_solve(shift, r)) + phi_form->delta +
                    opt.d_star.dot(Gbar * opt.d_star) -
                    2.0 * zeta.dot(opt.d_star);
    opt.value_phi_available = true;
  }
  return opt;
}

FeedbackLaw make_feedback(const ProblemSpec& spec, const RiccatiSolution& ric,
                          const AuxiliarySolution& aux, const Vec& lambda) {
  FeedbackLaw law;
  const int cells = spec.grid.n_steps();
  const std::vector<Vec> u0 = offset_control(spec, ric, aux, lambda);
  law.Theta_cell.resize(static_cast<size_t>(cells));
  law.u0_cell.resize(static_cast<size_t>(cells));
  for (int k = 0; k < cells; ++k) {
    law.Theta_cell[static_cast<size_t>(k)] = ric.Theta[static_cast<size_t>(k)];
    law.u0_cell[static_cast<size_t>(k)] = u0[static_cast<size_t>(k)];
  }
  return law;
}

}  // namespace slqmf
