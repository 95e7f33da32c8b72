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

#include "slqmf/errors.hpp"

namespace slqmf {

/// Uniform partition of [0, T] into n_steps cells. Coefficient paths are
/// piecewise constant on cells; solution paths live on the nodes.
class TimeGrid {
 public:
  TimeGrid() = default;

  TimeGrid(double horizon, int n_steps) : horizon_(horizon), n_steps_(n_steps) {
    if (!(horizon > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "horizon must be positive");
    }
    if (n_steps < 2) {
      throw Error(ErrorCode::kInvalidArgument, "n_steps must be at least 2");
    }
  }

  double horizon() const { return horizon_; }
  int n_steps() const { return n_steps_; }
  int n_nodes() const { return n_steps_ + 1; }
  double dt() const { return horizon_ / n_steps_; }
  double node(int k) const { return k == n_steps_ ? horizon_ : k * dt(); }

  /// Cell that contains [node(k), node(k+1)); the terminal node maps to the
  /// last cell.
  int cell_of_node(int k) const { return k < n_steps_ ? k : n_steps_ - 1; }

  bool operator==(const TimeGrid&) const = default;

 private:
  double horizon_ = 1.0;
  int n_steps_ = 2;
};

}  // namespace slqmf
