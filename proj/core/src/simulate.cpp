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

#include "slqmf/simulate.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "slqmf/rng.hpp"

namespace slqmf {

namespace {

constexpr int64_t kBlockSize = 4096;
constexpr double kOverflowNorm = 1e12;

int pair_count(int J) { return J * (J + 1) / 2; }

int sym_pair(int j, int k, int J) {
  if (j > k) std::swap(j, k);
  return j * J - j * (j - 1) / 2 + (k - j);
}

/// Sufficient statistics over one fixed block of paths. Block results do not
/// depend on which thread produced them, and blocks are merged pairwise in
/// index order, so the reduction is bit identical for any thread count.
struct BlockStats {
  std::vector<double> c, qp, rp, gp;
  std::vector<Vec> X;
  std::vector<double> cc;  ///< pairs j<=k: sum c_j c_k
  std::vector<Vec> cX;     ///< ordered pairs j*J+k: sum c_j X_k
  std::vector<Mat> XX;     ///< pairs j<=k: sum X_j X_k^T
  int64_t overflow = 0;
  bool initialized = false;

  void init(int J, int n) {
    c.assign(static_cast<size_t>(J), 0.0);
    qp.assign(static_cast<size_t>(J), 0.0);
    rp.assign(static_cast<size_t>(J), 0.0);
    gp.assign(static_cast<size_t>(J), 0.0);
    X.assign(static_cast<size_t>(J), Vec());
    for (auto& v : X) v = Vec::Zero(n);
    cc.assign(static_cast<size_t>(pair_count(J)), 0.0);
    cX.assign(static_cast<size_t>(J) * static_cast<size_t>(J), Vec());
    for (auto& v : cX) v = Vec::Zero(n);
    XX.assign(static_cast<size_t>(pair_count(J)), Mat());
    for (auto& m : XX) m = Mat::Zero(n, n);
    initialized = true;
  }

  void merge(const BlockStats& o) {
    for (size_t i = 0; i < c.size(); ++i) {
      c[i] += o.c[i];
      qp[i] += o.qp[i];
      rp[i] += o.rp[i];
      gp[i] += o.gp[i];
      X[i] += o.X[i];
    }
    for (size_t i = 0; i < cc.size(); ++i) cc[i] += o.cc[i];
    for (size_t i = 0; i < cX.size(); ++i) cX[i] += o.cX[i];
    for (size_t i = 0; i < XX.size(); ++i) XX[i] += o.XX[i];
    overflow += o.overflow;
  }
};

/// Pairwise tree merge of blocks [lo, hi); the tree depends only on block
/// indices.
BlockStats merge_range(std::vector<BlockStats>& blocks, int64_t lo,
                       int64_t hi) {
  if (hi - lo == 1) return std::move(blocks[static_cast<size_t>(lo)]);
  const int64_t mid = lo + (hi - lo) / 2;
  BlockStats left = merge_range(blocks, lo, mid);
  const BlockStats right = merge_range(blocks, mid, hi);
  left.merge(right);
  return left;
}

struct CellData {
  const Mat* A;
  const Mat* B;
  const Mat* C;
  const Mat* D;
  const Vec* a;
  const Vec* b;
  const Mat* Q;
  const Mat* R;
  const Vec* q;
  const Vec* p;
};

void check_config(const ProblemSpec& spec, const SimulationConfig& cfg) {
  if (cfg.n_paths < 2) {
    throw Error(ErrorCode::kInvalidArgument, "n_paths must be at least 2");
  }
  if (cfg.n_steps < spec.grid.n_steps() ||
      cfg.n_steps % spec.grid.n_steps() != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "simulation steps must be a positive multiple of grid steps");
  }
  if (cfg.antithetic && cfg.n_paths % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "antithetic sampling needs an even path count");
  }
}

void check_control(const ProblemSpec& spec, const ControlLaw& law) {
  const size_t cells = static_cast<size_t>(spec.grid.n_steps());
  if (law.u0_cell.size() != cells) {
    throw Error(ErrorCode::kInvalidArgument, "control u0 must cover all cells");
  }
  if (!law.Theta_cell.empty() && law.Theta_cell.size() != cells) {
    throw Error(ErrorCode::kInvalidArgument, "control Theta must cover cells");
  }
  if (!law.extra_cell.empty() && law.extra_cell.size() != cells) {
    throw Error(ErrorCode::kInvalidArgument, "control offset must cover cells");
  }
}

}  // namespace

MultiSimulationReport simulate_multi(const ProblemSpec& spec,
                                     const std::vector<ControlLaw>& controls,
                                     const SimulationConfig& cfg) {
  check_config(spec, cfg);
  if (controls.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one control");
  }
  for (const ControlLaw& law : controls) check_control(spec, law);

  const int J = static_cast<int>(controls.size());
  const int n = spec.dyn.n;
  const int m = spec.dyn.m;
  const int ratio = cfg.n_steps / spec.grid.n_steps();
  const double dt = spec.grid.horizon() / cfg.n_steps;
  const double sqrt_dt = std::sqrt(dt);
  const int64_t n_blocks = (cfg.n_paths + kBlockSize - 1) / kBlockSize;

  std::vector<CellData> cells(static_cast<size_t>(spec.grid.n_steps()));
  for (int k = 0; k < spec.grid.n_steps(); ++k) {
    cells[static_cast<size_t>(k)] = {
        &spec.dyn.A.at_cell(k),  &spec.dyn.B.at_cell(k),
        &spec.dyn.C.at_cell(k),  &spec.dyn.D.at_cell(k),
        &spec.dyn.a.at_cell(k),  &spec.dyn.b.at_cell(k),
        &spec.cost.Q.at_cell(k), &spec.cost.R.at_cell(k),
        &spec.cost.q.at_cell(k), &spec.cost.p.at_cell(k)};
  }

  std::vector<BlockStats> blocks(static_cast<size_t>(n_blocks));
  std::atomic<int64_t> next_block{0};

  auto worker = [&]() {
    std::vector<Vec> X(static_cast<size_t>(J), Vec(n));
    std::vector<double> qpart(static_cast<size_t>(J));
    std::vector<double> rpart(static_cast<size_t>(J));
    std::vector<double> cost(static_cast<size_t>(J));
    Vec u(m), du(m), drift(n), diff(n), tmp(n);

    for (;;) {
      const int64_t blk = next_block.fetch_add(1);
      if (blk >= n_blocks) break;
      BlockStats& stats = blocks[static_cast<size_t>(blk)];
      stats.init(J, n);
      const int64_t p_lo = blk * kBlockSize;
      const int64_t p_hi = std::min<int64_t>(p_lo + kBlockSize, cfg.n_paths);

      for (int64_t path = p_lo; path < p_hi; ++path) {
        const uint64_t draw_path =
            cfg.antithetic ? static_cast<uint64_t>(path / 2)
                           : static_cast<uint64_t>(path);
        const double sign = (cfg.antithetic && path % 2 == 1) ? -1.0 : 1.0;

        for (int j = 0; j < J; ++j) {
          X[static_cast<size_t>(j)] = spec.x0;
          qpart[static_cast<size_t>(j)] = 0.0;
          rpart[static_cast<size_t>(j)] = 0.0;
        }

        for (int step = 0; step < cfg.n_steps; ++step) {
          const int cell = step / ratio;
          const CellData& cd = cells[static_cast<size_t>(cell)];
          const double z = counter_normal(cfg.master_seed, 0, draw_path,
                                          static_cast<uint32_t>(step));
          const double dW = sqrt_dt * z * sign;

          for (int j = 0; j < J; ++j) {
            const ControlLaw& law = controls[static_cast<size_t>(j)];
            Vec& Xj = X[static_cast<size_t>(j)];

            u = law.u0_cell[static_cast<size_t>(cell)];
            if (!law.Theta_cell.empty()) {
              u.noalias() += law.Theta_cell[static_cast<size_t>(cell)] * Xj;
            }
            if (!law.extra_cell.empty()) {
              u += law.extra_cell[static_cast<size_t>(cell)];
            }

            // Left-endpoint running cost, consistent with the Euler step.
            tmp = Xj - *cd.q;
            qpart[static_cast<size_t>(j)] += dt * tmp.dot(*cd.Q * tmp);
            du = u - *cd.p;
            rpart[static_cast<size_t>(j)] += dt * du.dot(*cd.R * du);

            drift.noalias() = *cd.A * Xj;
            drift.noalias() += *cd.B * u;
            drift += *cd.a;
            diff.noalias() = *cd.C * Xj;
            diff.noalias() += *cd.D * u;
            diff += *cd.b;
            Xj += dt * drift + dW * diff;
          }
        }

        bool overflowed = false;
        for (int j = 0; j < J; ++j) {
          const Vec& Xj = X[static_cast<size_t>(j)];
          if (!Xj.allFinite() || Xj.norm() > kOverflowNorm) overflowed = true;
          tmp = Xj - spec.cost.xi;
          const double gterm = tmp.dot(spec.cost.G * tmp);
          cost[static_cast<size_t>(j)] =
              qpart[static_cast<size_t>(j)] + rpart[static_cast<size_t>(j)] +
              gterm;
          stats.qp[static_cast<size_t>(j)] += qpart[static_cast<size_t>(j)];
          stats.rp[static_cast<size_t>(j)] += rpart[static_cast<size_t>(j)];
          stats.gp[static_cast<size_t>(j)] += gterm;
          stats.c[static_cast<size_t>(j)] += cost[static_cast<size_t>(j)];
          stats.X[static_cast<size_t>(j)] += Xj;
        }
        if (overflowed) stats.overflow += 1;

        for (int j = 0; j < J; ++j) {
          for (int k = j; k < J; ++k) {
            stats.cc[static_cast<size_t>(sym_pair(j, k, J))] +=
                cost[static_cast<size_t>(j)] * cost[static_cast<size_t>(k)];
            stats.XX[static_cast<size_t>(sym_pair(j, k, J))].noalias() +=
                X[static_cast<size_t>(j)] *
                X[static_cast<size_t>(k)].transpose();
          }
          for (int k = 0; k < J; ++k) {
            stats.cX[static_cast<size_t>(j) * static_cast<size_t>(J) +
                     static_cast<size_t>(k)] +=
                cost[static_cast<size_t>(j)] * X[static_cast<size_t>(k)];
          }
        }
      }
    }
  };

  const int n_threads = std::max(1, cfg.n_threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  const BlockStats total = merge_range(blocks, 0, n_blocks);
  const double N = static_cast<double>(cfg.n_paths);
  const double nm1 = N - 1.0;

  MultiSimulationReport out;
  out.n_paths = cfg.n_paths;
  out.Gbar = spec.cost.Gbar;
  out.eta = spec.cost.eta;
  out.sum_c = total.c;
  out.sum_X = total.X;
  out.sum_cc.assign(static_cast<size_t>(J), std::vector<double>());
  out.sum_cX.assign(static_cast<size_t>(J), std::vector<Vec>());
  out.sum_XX.assign(static_cast<size_t>(J), std::vector<Mat>());
  for (int j = 0; j < J; ++j) {
    auto& ccj = out.sum_cc[static_cast<size_t>(j)];
    auto& cXj = out.sum_cX[static_cast<size_t>(j)];
    auto& XXj = out.sum_XX[static_cast<size_t>(j)];
    ccj.resize(static_cast<size_t>(J));
    cXj.resize(static_cast<size_t>(J));
    XXj.resize(static_cast<size_t>(J));
    for (int k = 0; k < J; ++k) {
      ccj[static_cast<size_t>(k)] =
          total.cc[static_cast<size_t>(sym_pair(j, k, J))];
      cXj[static_cast<size_t>(k)] =
          total.cX[static_cast<size_t>(j) * static_cast<size_t>(J) +
                   static_cast<size_t>(k)];
      const Mat& xx = total.XX[static_cast<size_t>(sym_pair(j, k, J))];
      XXj[static_cast<size_t>(k)] = (j <= k) ? xx : Mat(xx.transpose());
    }
  }

  out.reports.resize(static_cast<size_t>(J));
  for (int j = 0; j < J; ++j) {
    SimulationReport& rep = out.reports[static_cast<size_t>(j)];
    const size_t sj = static_cast<size_t>(j);
    const Vec mean_X = total.X[sj] / N;
    const double mean_c = total.c[sj] / N;

    rep.mean_XT = mean_X;
    rep.se_XT = Vec(n);
    const Mat& XXjj = out.sum_XX[sj][sj];
    for (int i = 0; i < n; ++i) {
      const double var =
          std::max(0.0, (XXjj(i, i) - N * mean_X(i) * mean_X(i)) / nm1);
      rep.se_XT(i) = std::sqrt(var / N);
    }

    const Vec dm = mean_X - spec.cost.eta;
    rep.decomposition.running_Q = total.qp[sj] / N;
    rep.decomposition.running_R = total.rp[sj] / N;
    rep.decomposition.terminal_G = total.gp[sj] / N;
    rep.decomposition.terminal_meanfield = dm.dot(spec.cost.Gbar * dm);
    rep.cost = rep.decomposition.total();
    rep.overflow_paths = total.overflow;

    // Delta-method linearization of cost + g(mean): y = c + grad g . X.
    const Vec grad = 2.0 * (spec.cost.Gbar * dm);
    const double var_c = (out.sum_cc[sj][sj] - N * mean_c * mean_c) / nm1;
    const Vec cov_cX = (out.sum_cX[sj][sj] - N * mean_c * mean_X) / nm1;
    const Mat cov_XX = (XXjj - N * mean_X * mean_X.transpose()) / nm1;
    const double var_y = std::max(
        0.0, var_c + 2.0 * grad.dot(cov_cX) + grad.dot(cov_XX * grad));
    rep.se_cost = std::sqrt(var_y / N);
  }

  out.diff_vs_first.resize(static_cast<size_t>(J > 0 ? J - 1 : 0));
  for (int j = 1; j < J; ++j) {
    std::vector<double> w(static_cast<size_t>(J), 0.0);
    w[static_cast<size_t>(j)] = 1.0;
    w[0] = -1.0;
    const auto [d, se] = out.combo(w);
    out.diff_vs_first[static_cast<size_t>(j - 1)] = {d, se};
  }
  return out;
}

std::pair<double, double> MultiSimulationReport::combo(
    const std::vector<double>& weights) const {
  const int J = static_cast<int>(reports.size());
  if (static_cast<int>(weights.size()) != J) {
    throw Error(ErrorCode::kInvalidArgument, "combo weight size mismatch");
  }
  const double N = static_cast<double>(n_paths);
  const double nm1 = N - 1.0;

  double value = 0.0;
  std::vector<Vec> grads(static_cast<size_t>(J));
  std::vector<Vec> means(static_cast<size_t>(J));
  std::vector<double> mean_c(static_cast<size_t>(J));
  for (int j = 0; j < J; ++j) {
    const size_t sj = static_cast<size_t>(j);
    value += weights[sj] * reports[sj].cost;
    means[sj] = sum_X[sj] / N;
    mean_c[sj] = sum_c[sj] / N;
    grads[sj] = 2.0 * (Gbar * (means[sj] - eta));
  }

  double var = 0.0;
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < J; ++k) {
      const size_t sj = static_cast<size_t>(j);
      const size_t sk = static_cast<size_t>(k);
      if (weights[sj] == 0.0 || weights[sk] == 0.0) continue;
      const double cov_cc =
          (sum_cc[sj][sk] - N * mean_c[sj] * mean_c[sk]) / nm1;
      const Vec cov_cjXk = (sum_cX[sj][sk] - N * mean_c[sj] * means[sk]) / nm1;
      const Vec cov_ckXj = (sum_cX[sk][sj] - N * mean_c[sk] * means[sj]) / nm1;
      const Mat cov_XX =
          (sum_XX[sj][sk] - N * means[sj] * means[sk].transpose()) / nm1;
      const double cov_yy = cov_cc + grads[sk].dot(cov_cjXk) +
                            grads[sj].dot(cov_ckXj) +
                            grads[sj].dot(cov_XX * grads[sk]);
      var += weights[sj] * weights[sk] * cov_yy;
    }
  }
  return {value, std::sqrt(std::max(0.0, var) / N)};
}

SimulationReport simulate(const ProblemSpec& spec, const ControlLaw& control,
                          const SimulationConfig& cfg) {
  return simulate_multi(spec, {control}, cfg).reports.front();
}

std::vector<std::vector<Vec>> perturbation_directions(const ProblemSpec& spec,
                                                      int n_dirs,
                                                      uint64_t dir_seed) {
  const int cells = spec.grid.n_steps();
  const int m = spec.dyn.m;
  const double dt = spec.grid.dt();
  std::vector<std::vector<Vec>> dirs(static_cast<size_t>(n_dirs));
  for (int d = 0; d < n_dirs; ++d) {
    auto& v = dirs[static_cast<size_t>(d)];
    v.resize(static_cast<size_t>(cells));
    double norm2 = 0.0;
    for (int c = 0; c < cells; ++c) {
      Vec vc(m);
      for (int i = 0; i < m; ++i) {
        vc(i) = counter_normal(dir_seed, 1, static_cast<uint64_t>(d),
                               static_cast<uint32_t>(c * m + i));
      }
      norm2 += vc.squaredNorm() * dt;
      v[static_cast<size_t>(c)] = vc;
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (Vec& vc : v) vc *= scale;
  }
  return dirs;
}

std::vector<PerturbationRow> perturbation_test(
    const ProblemSpec& spec, const ControlLaw& control,
    const SimulationConfig& cfg, int n_dirs,
    const std::vector<double>& eps_list, uint64_t dir_seed) {
  const auto dirs = perturbation_directions(spec, n_dirs, dir_seed);

  std::vector<ControlLaw> controls;
  controls.reserve(1 + dirs.size() * eps_list.size());
  controls.push_back(control);
  for (size_t d = 0; d < dirs.size(); ++d) {
    for (double eps : eps_list) {
      ControlLaw law = control;
      law.extra_cell = dirs[d];
      for (Vec& v : law.extra_cell) v *= eps;
      controls.push_back(std::move(law));
    }
  }

  const MultiSimulationReport multi = simulate_multi(spec, controls, cfg);
  std::vector<PerturbationRow> rows;
  rows.reserve(dirs.size() * eps_list.size());
  size_t idx = 0;
  for (size_t d = 0; d < dirs.size(); ++d) {
    for (double eps : eps_list) {
      const CostDiff& cd = multi.diff_vs_first[idx++];
      rows.push_back({static_cast<int>(d), eps, cd.diff, cd.se_diff});
    }
  }
  return rows;
}

Vec euler_mean_terminal(const ProblemSpec& spec, const ControlLaw& control,
                        int n_steps) {
  check_control(spec, control);
  if (n_steps < spec.grid.n_steps() || n_steps % spec.grid.n_steps() != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "steps must be a positive multiple of grid steps");
  }
  const int ratio = n_steps / spec.grid.n_steps();
  const double dt = spec.grid.horizon() / n_steps;
  Vec mean = spec.x0;
  for (int step = 0; step < n_steps; ++step) {
    const int cell = step / ratio;
    Vec u = control.u0_cell[static_cast<size_t>(cell)];
    if (!control.Theta_cell.empty()) {
      u.noalias() += control.Theta_cell[static_cast<size_t>(cell)] * mean;
    }
    if (!control.extra_cell.empty()) {
      u += control.extra_cell[static_cast<size_t>(cell)];
    }
    mean += dt * (spec.dyn.A.at_cell(cell) * mean +
                  spec.dyn.B.at_cell(cell) * u + spec.dyn.a.at_cell(cell));
  }
  return mean;
}

}  // namespace slqmf
