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
#include <utility>
#include <vector>

#include "slqmf/errors.hpp"
#include "slqmf/grid.hpp"

namespace slqmf {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Piecewise-constant matrix-valued path: either one value shared by all
/// cells or one value per cell.
class MatrixPath {
 public:
  MatrixPath() = default;

  static MatrixPath constant(Mat value) {
    MatrixPath p;
    p.cells_.push_back(std::move(value));
    return p;
  }

  static MatrixPath per_cell(std::vector<Mat> values) {
    if (values.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "per-cell path needs values");
    }
    MatrixPath p;
    p.cells_ = std::move(values);
    return p;
  }

  bool is_constant() const { return cells_.size() == 1; }
  int n_cells() const { return static_cast<int>(cells_.size()); }

  const Mat& at_cell(int k) const {
    return cells_.size() == 1 ? cells_.front() : cells_[static_cast<size_t>(k)];
  }

  Eigen::Index rows() const { return cells_.front().rows(); }
  Eigen::Index cols() const { return cells_.front().cols(); }

  const std::vector<Mat>& cells() const { return cells_; }
  std::vector<Mat>& cells() { return cells_; }

  /// All cells must share the given shape and the path must cover the grid
  /// (one value, or exactly one value per cell).
  void check(const TimeGrid& grid, Eigen::Index r, Eigen::Index c,
             const char* name) const {
    if (cells_.empty()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  std::string(name) + " path is empty");
    }
    if (cells_.size() != 1 &&
        cells_.size() != static_cast<size_t>(grid.n_steps())) {
      throw Error(ErrorCode::kDimensionMismatch,
                  std::string(name) + " path must have 1 or n_steps entries");
    }
    for (const Mat& m : cells_) {
      if (m.rows() != r || m.cols() != c) {
        throw Error(ErrorCode::kDimensionMismatch,
                    std::string(name) + " entry has wrong shape");
      }
    }
  }


 private:
  std::vector<Mat> cells_;
};

/// Piecewise-constant vector-valued path.
class VectorPath {
 public:
  VectorPath() = default;

  static VectorPath constant(Vec value) {
    VectorPath p;
    p.cells_.push_back(std::move(value));
    return p;
  }

  static VectorPath zero(Eigen::Index dim) {
    return constant(Vec::Zero(dim));
  }

  static VectorPath per_cell(std::vector<Vec> values) {
    if (values.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "per-cell path needs values");
    }
    VectorPath p;
    p.cells_ = std::move(values);
    return p;
  }

  bool is_constant() const { return cells_.size() == 1; }
  int n_cells() const { return static_cast<int>(cells_.size()); }

  const Vec& at_cell(int k) const {
    return cells_.size() == 1 ? cells_.front() : cells_[static_cast<size_t>(k)];
  }

  Eigen::Index size() const { return cells_.front().size(); }

  const std::vector<Vec>& cells() const { return cells_; }
  std::vector<Vec>& cells() { return cells_; }

  bool is_zero() const {
    for (const Vec& v : cells_) {
      if (v.cwiseAbs().maxCoeff() != 0.0) return false;
    }
    return true;
  }

  void check(const TimeGrid& grid, Eigen::Index dim, const char* name) const {
    if (cells_.empty()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  std::string(name) + " path is empty");
    }
    if (cells_.size() != 1 &&
        cells_.size() != static_cast<size_t>(grid.n_steps())) {
      throw Error(ErrorCode::kDimensionMismatch,
                  std::string(name) + " path must have 1 or n_steps entries");
    }
    for (const Vec& v : cells_) {
      if (v.size() != dim) {
        throw Error(ErrorCode::kDimensionMismatch,
                    std::string(name) + " entry has wrong size");
      }
    }
  }


 private:
  std::vector<Vec> cells_;
};

}  // namespace slqmf
