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

#include "slqmf/auxiliary.hpp"

#include <algorithm>
#include <cmath>

namespace slqmf {

namespace {

constexpr double kPinvTol = 1e-12;

Mat inverse_pd(const Mat& P, ErrorCode code, const char* what) {
  Eigen::SelfAdjointEigenSolver<Mat> es(P);
  if (es.eigenvalues().minCoeff() < kPinvTol) {
    throw Error(code, std::string(what) + " not invertible, lambda_min = " +
                          std::to_string(es.eigenvalues().minCoeff()));
  }
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

/// Per-evaluation context: everything the H/K generators need at one time
/// point inside one cell.
struct PointData {
  Mat theta;
  Mat Ahat;
  Mat Chat;
  const Mat* P;
};

PointData point_data(const ProblemSpec& spec, int cell, const Mat& P) {
  PointData d;
  d.theta = feedback_gain(P, spec.dyn.B.at_cell(cell), spec.dyn.C.at_cell(cell),
                          spec.dyn.D.at_cell(cell), spec.cost.R.at_cell(cell));
  d.Ahat = spec.dyn.A.at_cell(cell) + spec.dyn.B.at_cell(cell) * d.theta;
  d.Chat = spec.dyn.C.at_cell(cell) + spec.dyn.D.at_cell(cell) * d.theta;
  d.P = &P;
  return d;
}

Mat h_rhs(const ProblemSpec& spec, int cell, const PointData& d, const Mat& M) {
  // dH/dt = -(Ahat^T H + r), r in column 0 only.
  Mat g = d.Ahat.transpose() * M;
  g.col(0) += d.Chat.transpose() * (*d.P * spec.dyn.b.at_cell(cell)) +
              *d.P * spec.dyn.a.at_cell(cell) -
              spec.cost.Q.at_cell(cell) * spec.cost.q.at_cell(cell);
  return -g;
}

Mat k_rhs(const ProblemSpec& spec, int cell, const PointData& d, const Mat& M) {
  const Mat Pinv = inverse_pd(*d.P, ErrorCode::kSingularP, "P");
  const Mat S = d.Chat.transpose() * (*d.P);
  const Mat drift = -spec.dyn.A.at_cell(cell) -
                    Pinv * spec.cost.Q.at_cell(cell) -
                    Pinv * S * spec.dyn.C.at_cell(cell);
  Mat g = drift * M;
  g.col(0) += spec.dyn.a.at_cell(cell) + Pinv * S * spec.dyn.b.at_cell(cell) -
              Pinv * (spec.cost.Q.at_cell(cell) * spec.cost.q.at_cell(cell));
  return -g;
}

template <typename Rhs>
void integrate_backward(const ProblemSpec& spec, const RiccatiSolution& ric,
                        Mat terminal, Rhs rhs, std::vector<Mat>& fine) {
  const int n_steps = spec.grid.n_steps();
  const int S = ric.substeps;
  const double h = -ric.fine_dt();

  fine.resize(static_cast<size_t>(ric.n_fine()));
  Mat M = std::move(terminal);
  fine.back() = M;

  for (int cell = n_steps - 1; cell >= 0; --cell) {
    for (int sub = S - 1; sub >= 0; --sub) {
      const int j = ric.fine_index(cell, sub);
      const Mat& Pl = ric.P_fine[static_cast<size_t>(j)];
      const Mat& Pr = ric.P_fine[static_cast<size_t>(j + 1)];
      const Mat Pm = riccati_midpoint(spec, ric, cell, sub);
      const PointData dl = point_data(spec, cell, Pl);
      const PointData dm = point_data(spec, cell, Pm);
      const PointData dr = point_data(spec, cell, Pr);

      const Mat k1 = rhs(spec, cell, dr, M);
      const Mat k2 = rhs(spec, cell, dm, Mat(M + 0.5 * h * k1));
      const Mat k3 = rhs(spec, cell, dm, Mat(M + 0.5 * h * k2));
      const Mat k4 = rhs(spec, cell, dl, Mat(M + h * k3));
      M += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!(M.norm() < kBlowUpNorm)) {
        throw Error(ErrorCode::kBlowUp, "auxiliary system norm exceeds 1e12");
      }
      fine[static_cast<size_t>(j)] = M;
    }
  }
}

std::vector<Mat> nodes_from_fine(const RiccatiSolution& ric,
                                 const std::vector<Mat>& fine) {
  std::vector<Mat> nodes(static_cast<size_t>(ric.grid.n_steps()) + 1);
  for (int k = 0; k <= ric.grid.n_steps(); ++k) {
    nodes[static_cast<size_t>(k)] =
        fine[static_cast<size_t>(k * ric.substeps)];
  }
  return nodes;
}

}  // namespace

void solve_H_system(const ProblemSpec& spec, const RiccatiSolution& ric,
                    AuxiliarySolution& aux) {
  const int n = spec.dyn.n;
  Mat terminal(n, n + 1);
  terminal.col(0) = -(spec.cost.G * spec.cost.xi);
  terminal.rightCols(n) = Mat::Identity(n, n);
  integrate_backward(spec, ric, std::move(terminal), h_rhs, aux.H_fine);
  aux.H = nodes_from_fine(ric, aux.H_fine);
}

std::vector<Vec> solve_H_direct(const ProblemSpec& spec,
                                const RiccatiSolution& ric,
                                const Vec& terminal) {
  std::vector<Mat> fine;
  integrate_backward(spec, ric, Mat(terminal), h_rhs, fine);
  std::vector<Vec> nodes(static_cast<size_t>(spec.grid.n_steps()) + 1);
  for (int k = 0; k <= spec.grid.n_steps(); ++k) {
    nodes[static_cast<size_t>(k)] =
        fine[static_cast<size_t>(k * ric.substeps)].col(0);
  }
  return nodes;
}

void solve_K_system(const ProblemSpec& spec, const RiccatiSolution& ric,
                    AuxiliarySolution& aux) {
  const int n = spec.dyn.n;
  const Mat Ginv = inverse_pd(spec.cost.G, ErrorCode::kSingularG, "G");
  Mat terminal(n, n + 1);
  terminal.col(0) = -spec.cost.xi;
  terminal.rightCols(n) = Ginv;
  integrate_backward(spec, ric, std::move(terminal), k_rhs, aux.K_fine);
  aux.K = nodes_from_fine(ric, aux.K_fine);
  aux.K_available = true;
}

AuxiliarySolution solve_auxiliary(const ProblemSpec& spec,
                                  const RiccatiSolution& ric) {
  AuxiliarySolution aux;
  aux.grid = spec.grid;
  aux.substeps = ric.substeps;
  solve_H_system(spec, ric, aux);
  if (min_eig(spec.cost.G) > kPsdTol) {
    solve_K_system(spec, ric, aux);
  }

  const int n_nodes = spec.grid.n_steps() + 1;
  aux.S.resize(static_cast<size_t>(n_nodes));
  aux.Rscript.resize(static_cast<size_t>(n_nodes));
  for (int k = 0; k < n_nodes; ++k) {
    const int cell = spec.grid.cell_of_node(k);
    const Mat& P = ric.P[static_cast<size_t>(k)];
    const Mat& D = spec.dyn.D.at_cell(cell);
    const Mat N = symmetrize(D.transpose() * P * D + spec.cost.R.at_cell(cell));
    aux.S[static_cast<size_t>(k)] =
        ric.Chat[static_cast<size_t>(k)].transpose() * P;
    aux.Rscript[static_cast<size_t>(k)] =
        symmetrize(P - P * D * Eigen::LDLT<Mat>(N).solve(D.transpose() * P));
  }
  aux.u0 = offset_control(spec, ric, aux, Vec::Zero(spec.dyn.n));
  return aux;
}

double consistency_check(const RiccatiSolution& ric,
                         const AuxiliarySolution& aux) {
  if (!aux.K_available) {
    throw Error(ErrorCode::kSingularG, "K system was not solved");
  }
  double worst = 0.0;
  for (size_t k = 0; k < aux.H.size(); ++k) {
    const Mat diff = ric.P[k] * aux.K[k] - aux.H[k];
    for (Eigen::Index i = 0; i < diff.cols(); ++i) {
      worst = std::max(worst, diff.col(i).norm());
    }
  }
  return worst;
}

std::vector<Vec> offset_control(const ProblemSpec& spec,
                                const RiccatiSolution& ric,
                                const AuxiliarySolution& aux,
                                const Vec& lambda) {
  const int n = spec.dyn.n;
  std::vector<Vec> u0(aux.H.size());
  for (size_t k = 0; k < aux.H.size(); ++k) {
    const int cell = spec.grid.cell_of_node(static_cast<int>(k));
    const Mat& P = ric.P[k];
    const Mat& B = spec.dyn.B.at_cell(cell);
    const Mat& D = spec.dyn.D.at_cell(cell);
    const Mat N = symmetrize(D.transpose() * P * D + spec.cost.R.at_cell(cell));
    if (min_eig(N) < kGainTol) {
      throw Error(ErrorCode::kNearSingularGain, "offset control gain");
    }
    const Vec H = aux.H[k].col(0) + aux.H[k].rightCols(n) * lambda;
    const Vec rhs = B.transpose() * H +
                    D.transpose() * (P * spec.dyn.b.at_cell(cell));
    u0[k] = -Eigen::LDLT<Mat>(N).solve(rhs);
  }
  return u0;
}

std::vector<Vec> offset_control_k_route(const ProblemSpec& spec,
                                        const RiccatiSolution& ric,
                                        const AuxiliarySolution& aux,
                                        const Vec& lambda) {
  if (!aux.K_available) {
    throw Error(ErrorCode::kSingularG, "K system was not solved");
  }
  const int n = spec.dyn.n;
  std::vector<Vec> u1(aux.K.size());
  for (size_t k = 0; k < aux.K.size(); ++k) {
    const int cell = spec.grid.cell_of_node(static_cast<int>(k));
    const Mat& P = ric.P[k];
    const Mat& B = spec.dyn.B.at_cell(cell);
    const Mat& D = spec.dyn.D.at_cell(cell);
    const Mat N = symmetrize(D.transpose() * P * D + spec.cost.R.at_cell(cell));
    const Vec K = aux.K[k].col(0) + aux.K[k].rightCols(n) * lambda;
    const Vec rhs = B.transpose() * (P * K) +
                    D.transpose() * (P * spec.dyn.b.at_cell(cell));
    u1[k] = -Eigen::LDLT<Mat>(N).solve(rhs);
  }
  return u1;
}

}  // namespace slqmf
