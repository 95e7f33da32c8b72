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

#include "slqmf/portfolio.hpp"

#include <algorithm>
#include <cmath>

namespace slqmf {

namespace {

void check_model(const MVModel& mv) {
  const int n = mv.dim();
  if (n < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "market needs an asset");
  }
  if (mv.sigma.size() != n || mv.upsilon.size() != n || mv.x0.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mu, sigma, upsilon, x0 must share one size");
  }
  if (mv.Sigma.rows() != n || mv.Sigma.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "Sigma must be n x n");
  }
  if ((mv.sigma.array() <= 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "volatilities must be positive");
  }
  require_symmetric(mv.Sigma, "Sigma");
  if (min_eig(symmetrize(mv.Sigma)) < kPsdTol) {
    throw Error(ErrorCode::kSingularSigma, "Sigma is not positive definite");
  }
}

}  // namespace

ProblemSpec build_mv_spec(const MVModel& mv) {
  check_model(mv);
  const int n = mv.dim();
  const Mat Sigma = symmetrize(mv.Sigma);

  ProblemSpec spec;
  spec.grid = TimeGrid(mv.horizon, mv.steps);
  spec.dyn.n = n;
  spec.dyn.m = n;
  spec.dyn.A = MatrixPath::constant(Mat::Zero(n, n));
  spec.dyn.B = MatrixPath::constant(Mat(mv.mu.asDiagonal()));
  spec.dyn.C = MatrixPath::constant(Mat::Zero(n, n));
  spec.dyn.D = MatrixPath::constant(Mat(mv.sigma.asDiagonal()));
  spec.dyn.a = VectorPath::zero(n);
  spec.dyn.b = VectorPath::zero(n);
  spec.cost.Q = MatrixPath::constant(Mat::Zero(n, n));
  spec.cost.R = MatrixPath::constant(Mat::Zero(n, n));
  spec.cost.G = Sigma;
  spec.cost.Gbar = -Sigma;
  spec.cost.q = VectorPath::zero(n);
  spec.cost.p = VectorPath::zero(n);
  spec.cost.xi = sym_inverse(Sigma, "Sigma") * mv.upsilon;
  spec.cost.eta = Vec::Zero(n);
  spec.x0 = mv.x0;
  return normalize(spec);
}

MVModel example_market(bool use_printed_sigma3) {
  MVModel mv;
  mv.mu = Vec(3);
  mv.mu << 0.08, 0.03, 0.05;
  mv.sigma = Vec(3);
  mv.sigma << 0.20, 0.05, (use_printed_sigma3 ? 0.30 : 0.25);
  mv.upsilon = Vec(3);
  mv.upsilon << 1.5, 1.0, 0.5;
  mv.x0 = Vec(3);
  mv.x0 << 15.0, 10.0, 5.0;
  mv.Sigma = Mat(3, 3);
  mv.Sigma << 3.5, -0.5, -0.5,
              -0.5, 2.6, -0.5,
              -0.5, -0.5, 1.5;
  mv.horizon = 1.0;
  mv.steps = 500;
  return mv;
}

Mat example_sigma_initial() {
  Mat s(3, 3);
  s << 3.5, 0.6, -0.5,
       0.6, 2.6, -0.3,
       -0.5, -0.3, 1.5;
  return s;
}

MVClosedForm closed_form_value(const MVModel& mv, const Mat& P0) {
  check_model(mv);
  const Mat Sigma = symmetrize(mv.Sigma);
  const Mat Sinv = sym_inverse(Sigma, "Sigma");
  const Vec xi = Sinv * mv.upsilon;

  MVClosedForm cf;
  cf.PhiS = symmetrize(Sinv * P0 * Sinv - Sinv);
  cf.phi = Sinv * (P0 * (mv.x0 - xi)) + xi;

  const Mat PhiS_inv = sym_inverse(cf.PhiS, "Phi");
  const Mat M = symmetrize(-Sigma - PhiS_inv);
  cf.predicate = min_eig(M) > kPsdTol;

  const Vec g = PhiS_inv * cf.phi;
  cf.d_star = -sym_solve(M, g);
  cf.lambda_star = -PhiS_inv * (cf.phi - cf.d_star);
  cf.value_display = g.dot(sym_solve(M, g)) + g.dot(cf.phi) -
                     (mv.x0 - xi).dot(P0 * (mv.x0 - xi));
  cf.objective = mv.upsilon.dot(xi) + cf.value_display;
  return cf;
}

double mv_objective(const MVModel& mv, int substeps) {
  const ProblemSpec spec = build_mv_spec(mv);
  const RiccatiSolution ric = integrate(spec, substeps);
  return closed_form_value(mv, ric.P.front()).objective;
}

SweepResult sweep(const MVModel& mv, int row, int col,
                  const std::vector<double>& values, int substeps) {
  check_model(mv);
  if (row < 0 || col < 0 || row >= mv.dim() || col >= mv.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "sweep element out of range");
  }
  SweepResult res;
  res.row = row;
  res.col = col;
  res.points.reserve(values.size());

  for (double v : values) {
    MVModel probe = mv;
    probe.Sigma(row, col) = v;
    probe.Sigma(col, row) = v;  // keep Sigma symmetric
    SweepPoint pt;
    pt.value = v;
    if (min_eig(symmetrize(probe.Sigma)) < kPsdTol) {
      pt.skipped = true;
      ++res.skipped_count;
    } else {
      const ProblemSpec spec = build_mv_spec(probe);
      const RiccatiSolution ric = integrate(spec, substeps);
      const MVClosedForm cf = closed_form_value(probe, ric.P.front());
      pt.objective = cf.objective;
      pt.solvable = cf.predicate;
    }
    res.points.push_back(pt);
  }

  std::vector<double> kept;
  for (const SweepPoint& pt : res.points) {
    if (!pt.skipped) kept.push_back(pt.objective);
  }
  if (kept.size() >= 2) {
    res.monotone_decreasing = true;
    for (size_t i = 1; i < kept.size(); ++i) {
      if (!(kept[i] < kept[i - 1])) res.monotone_decreasing = false;
    }
    const auto it = std::min_element(kept.begin(), kept.end());
    const size_t arg = static_cast<size_t>(it - kept.begin());
    res.interior_minimum = arg > 0 && arg + 1 < kept.size();
  }
  return res;
}

std::vector<double> linspace(double from, double to, int points) {
  if (points < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least two sweep points");
  }
  std::vector<double> v(static_cast<size_t>(points));
  for (int i = 0; i < points; ++i) {
    v[static_cast<size_t>(i)] = from + (to - from) * i / (points - 1);
  }
  return v;
}

DiagonalSensitivity diagonal_sensitivity(const MVModel& mv, double h,
                                         int substeps) {
  auto derivative = [&](int i) {
    MVModel up = mv;
    up.Sigma(i, i) += h;
    MVModel dn = mv;
    dn.Sigma(i, i) -= h;
    return (mv_objective(up, substeps) - mv_objective(dn, substeps)) /
           (2.0 * h);
  };
  DiagonalSensitivity s;
  s.d11 = derivative(0);
  s.d22 = derivative(1);
  s.d33 = derivative(2);
  return s;
}

}  // namespace slqmf
