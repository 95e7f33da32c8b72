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

#include <cstdint>
#include <vector>

#include "slqmf/duality.hpp"

namespace slqmf {

struct SimulationConfig {
  int64_t n_paths = 10000;
  int n_steps = 0;  ///< simulation steps; must be a multiple of grid steps
  uint64_t master_seed = 0;
  bool antithetic = false;
  int n_threads = 1;
};

/// A control evaluated per simulation step as
///   u = Theta_cell X + u0_cell + extra_cell
/// where cell is the coarse grid cell containing the step; coefficients are
/// held constant on cells. Theta_cell and extra_cell may be empty.
struct ControlLaw {
  std::vector<Mat> Theta_cell;
  std::vector<Vec> u0_cell;
  std::vector<Vec> extra_cell;

  static ControlLaw from_feedback(const FeedbackLaw& law) {
    return ControlLaw{law.Theta_cell, law.u0_cell, {}};
  }
};

struct CostDecomposition {
  double running_Q = 0.0;
  double running_R = 0.0;
  double terminal_G = 0.0;
  double terminal_meanfield = 0.0;
  double total() const {
    return running_Q + running_R + terminal_G + terminal_meanfield;
  }
};

struct SimulationReport {
  Vec mean_XT;
  Vec se_XT;
  double cost = 0.0;     ///< always equals decomposition.total()
  double se_cost = 0.0;  ///< delta-method SE including the mean-field term
  CostDecomposition decomposition;
  int64_t overflow_paths = 0;
};

/// Difference of costs against the first control, evaluated with common
/// random numbers; the SE is for the difference estimator.
struct CostDiff {
  double diff = 0.0;
  double se_diff = 0.0;
};

struct MultiSimulationReport {
  std::vector<SimulationReport> reports;
  std::vector<CostDiff> diff_vs_first;  ///< size = controls - 1

  /// Mean and SE of sum_j w_j * cost_j (delta-method linearization).
  std::pair<double, double> combo(const std::vector<double>& weights) const;

  // Pooled sufficient statistics kept for combo(); one entry per control.
  int64_t n_paths = 0;
  std::vector<double> sum_c;
  std::vector<Vec> sum_X;
  std::vector<std::vector<double>> sum_cc;  ///< [j][k], j<=k
  std::vector<std::vector<Vec>> sum_cX;     ///< [j][k]: sum c_j X_k
  std::vector<std::vector<Mat>> sum_XX;     ///< [j][k], j<=k
  Mat Gbar;
  Vec eta;
};

/// Euler-Maruyama over the full cost functional, including the mean-field
/// term evaluated with the plug-in empirical mean of X(T). All controls are
/// advanced through the same Brownian increments. Reductions use a fixed
/// block partition merged pairwise in index order, so results are bit
/// identical for any thread count.
MultiSimulationReport simulate_multi(const ProblemSpec& spec,
                                     const std::vector<ControlLaw>& controls,
                                     const SimulationConfig& cfg);

SimulationReport simulate(const ProblemSpec& spec, const ControlLaw& control,
                          const SimulationConfig& cfg);

struct PerturbationRow {
  int direction = 0;
  double eps = 0.0;
  double diff = 0.0;
  double se_diff = 0.0;
};

/// Estimates J(x; u + eps v) - J(x; u) for random piecewise-constant
/// directions v with unit L2([0,T]) norm, reusing the baseline's Brownian
/// increments. Directions are drawn from a stream keyed by dir_seed.
std::vector<PerturbationRow> perturbation_test(
    const ProblemSpec& spec, const ControlLaw& control,
    const SimulationConfig& cfg, int n_dirs,
    const std::vector<double>& eps_list, uint64_t dir_seed = 1);

/// The directions used by perturbation_test, exposed for reporting.
std::vector<std::vector<Vec>> perturbation_directions(const ProblemSpec& spec,
                                                      int n_dirs,
                                                      uint64_t dir_seed);

/// Deterministic mean path of the closed-loop Euler recursion; the Monte
/// Carlo mean converges to its endpoint as paths grow.
Vec euler_mean_terminal(const ProblemSpec& spec, const ControlLaw& control,
                        int n_steps);

}  // namespace slqmf
