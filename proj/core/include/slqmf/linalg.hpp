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

#include <Eigen/Dense>
#include <string>

#include "slqmf/errors.hpp"

namespace slqmf {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Eigenvalue threshold below which a symmetric matrix is not accepted as
/// positive definite, and above whose negative a matrix still counts as
/// positive semidefinite.
inline constexpr double kPsdTol = 1e-10;

/// Input matrices may be asymmetric up to this bound; anything worse is
/// rejected instead of silently symmetrized.
inline constexpr double kSymTol = 1e-12;

/// Condition numbers beyond this are refused for symmetric inverses.
inline constexpr double kMaxCond = 1e12;

inline Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

inline double min_eig(const Mat& sym) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double max_abs_eig(const Mat& sym) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline bool is_psd(const Mat& sym, double tol = kPsdTol) {
  return min_eig(sym) >= -tol;
}

inline bool is_pd(const Mat& sym, double tol = kPsdTol) {
  return min_eig(sym) >= tol;
}

/// Symmetrizes the input when the asymmetry is within kSymTol, otherwise
/// rejects it as an input error.
inline Mat require_symmetric(const Mat& m, const std::string& name) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, name + " is not square");
  }
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymTol) {
    throw Error(ErrorCode::kAsymmetricInput,
                name + " asymmetry " + std::to_string(asym) +
                    " exceeds tolerance");
  }
  return symmetrize(m);
}

/// Condition number (ratio of extreme |eigenvalues|) of a symmetric matrix.
inline double sym_cond(const Mat& sym) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().cwiseAbs().minCoeff();
  const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

/// Inverse of a symmetric matrix through its eigendecomposition, refusing
/// condition numbers above kMaxCond.
inline Mat sym_inverse(const Mat& sym, const std::string& name,
                       double* cond_out = nullptr) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  const Vec& ev = es.eigenvalues();
  const double lo = ev.cwiseAbs().minCoeff();
  const double hi = ev.cwiseAbs().maxCoeff();
  const double cond =
      lo == 0.0 ? std::numeric_limits<double>::infinity() : hi / lo;
  if (cond_out != nullptr) *cond_out = cond;
  if (!(cond < kMaxCond)) {
    throw Error(ErrorCode::kIllConditioned,
                name + " condition number " + std::to_string(cond));
  }
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

/// Solves sym * x = rhs by LDLT; the caller guarantees definiteness.
inline Vec sym_solve(const Mat& sym, const Vec& rhs) {
  return Eigen::LDLT<Mat>(sym).solve(rhs);
}

/// Symmetric PSD square root via eigendecomposition.
inline Mat sqrt_psd(const Mat& sym, const std::string& name) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.eigenvalues().minCoeff() < -kPsdTol) {
    throw Error(ErrorCode::kInvalidArgument, name + " is not PSD");
  }
  return es.eigenvectors() *
         es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace slqmf
