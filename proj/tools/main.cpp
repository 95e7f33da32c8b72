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

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>

#include "slqmf/json_io.hpp"
#include "slqmf/slqmf.hpp"

namespace fs = std::filesystem;
using namespace slqmf;

namespace {

struct CommonOpts {
  std::string input;
  std::string out_dir;
  int substeps = kDefaultSubsteps;
  bool quad_refine = false;
  int threads = 0;  // 0 = hardware concurrency

  int resolved_threads() const {
    if (threads > 0) return threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
  }
};

struct SimOpts {
  int64_t paths = 100000;
  int steps = 0;  // 0 = smallest multiple of grid steps >= 500
  uint64_t seed = 0;
  bool antithetic = false;
  int dump_paths = 0;
};

std::string default_out_dir() {
  const char* env = std::getenv("SLQMF_OUT_DIR");
  return (env != nullptr && *env != '\0') ? env : ".";
}

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("file", o.input, "input JSON file")->required();
  cmd->add_option("--out", o.out_dir,
                  "output directory (default: $SLQMF_OUT_DIR or .)");
  cmd->add_option("--substeps", o.substeps,
                  "Runge-Kutta substeps per grid cell")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--quad-refine", o.quad_refine,
                "evaluate dual integrals on substep endpoints");
  cmd->add_option("--threads", o.threads, "simulation worker threads");
}

fs::path ensure_out_dir(CommonOpts& o) {
  if (o.out_dir.empty()) o.out_dir = default_out_dir();
  fs::path dir(o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kIoError,
                "cannot create output directory '" + o.out_dir + "'");
  }
  return dir;
}

void write_report(const fs::path& dir, const Json& j) {
  write_text_file((dir / "report.json").string(), j.dump(2) + "\n");
}

int choose_sim_steps(const TimeGrid& grid, int requested) {
  if (requested > 0) {
    if (requested % grid.n_steps() != 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--steps must be a multiple of the grid's steps");
    }
    return requested;
  }
  const int g = grid.n_steps();
  return g >= 500 ? g : g * ((500 + g - 1) / g);
}

/// First k sample trajectories in long CSV form (path,t,X1..Xn), stepping
/// the same scheme and substreams as the estimator.
std::string paths_csv(const ProblemSpec& spec, const ControlLaw& law,
                      const SimulationConfig& cfg, int k_paths) {
  const int n = spec.dyn.n;
  const int ratio = cfg.n_steps / spec.grid.n_steps();
  const double dt = spec.grid.horizon() / cfg.n_steps;
  const double sqrt_dt = std::sqrt(dt);

  std::string out = "path,t";
  for (int i = 0; i < n; ++i) out += ",X" + std::to_string(i + 1);
  out += "\n";
  char buf[340];
  for (int64_t p = 0; p < std::min<int64_t>(k_paths, cfg.n_paths); ++p) {
    Vec X = spec.x0;
    for (int step = 0; step <= cfg.n_steps; ++step) {
      int written = std::snprintf(buf, sizeof buf, "%lld,%.10g",
                                  static_cast<long long>(p), step * dt);
      for (int i = 0; i < n; ++i) {
        written += std::snprintf(buf + written, sizeof buf - written,
                                 ",%.10g", X(i));
      }
      out.append(buf, static_cast<size_t>(written));
      out += "\n";
      if (step == cfg.n_steps) break;
      const int cell = step / ratio;
      Vec u = law.u0_cell[static_cast<size_t>(cell)];
      if (!law.Theta_cell.empty()) {
        u.noalias() += law.Theta_cell[static_cast<size_t>(cell)] * X;
      }
      const double z =
          counter_normal(cfg.master_seed, 0, static_cast<uint64_t>(p),
                         static_cast<uint32_t>(step));
      const Vec drift = spec.dyn.A.at_cell(cell) * X +
                        spec.dyn.B.at_cell(cell) * u +
                        spec.dyn.a.at_cell(cell);
      const Vec diffu = spec.dyn.C.at_cell(cell) * X +
                        spec.dyn.D.at_cell(cell) * u +
                        spec.dyn.b.at_cell(cell);
      X += dt * drift + sqrt_dt * z * diffu;
    }
  }
  return out;
}

int run_check(CommonOpts& o) {
  const fs::path dir = ensure_out_dir(o);
  const ProblemSpec spec = load_problem_file(o.input);
  const SolveResult res = check_pipeline(spec, {o.substeps, o.quad_refine});
  Json j = solve_report_json(res);
  j["status"] = "ok";
  j["command"] = "check";
  write_report(dir, j);
  std::cout << "check: case=" << to_string(res.tag.variant)
            << " feasible=" << (res.feas.feasible_for_all_d ? "yes" : "no")
            << " type1=" << res.verdicts.type1
            << " type2=" << res.verdicts.type2 << "\n";
  return 0;
}

int run_solve(CommonOpts& o, bool dump_p, bool dump_aux) {
  const fs::path dir = ensure_out_dir(o);
  const ProblemSpec spec = load_problem_file(o.input);
  const SolveResult res = solve_pipeline(spec, {o.substeps, o.quad_refine});
  Json j = solve_report_json(res);
  j["status"] = "ok";
  j["command"] = "solve";
  write_report(dir, j);
  if (dump_p) {
    write_text_file((dir / "p_path.csv").string(), p_path_csv(res.ric));
  }
  if (dump_aux) {
    std::vector<Vec> H0(res.aux.H.size());
    for (size_t k = 0; k < res.aux.H.size(); ++k) H0[k] = res.aux.H[k].col(0);
    write_text_file((dir / "h0_path.csv").string(),
                    vector_path_csv(res.normalized.grid, H0, "H"));
    if (res.aux.K_available) {
      std::vector<Vec> K0(res.aux.K.size());
      for (size_t k = 0; k < res.aux.K.size(); ++k) {
        K0[k] = res.aux.K[k].col(0);
      }
      write_text_file((dir / "k0_path.csv").string(),
                      vector_path_csv(res.normalized.grid, K0, "K"));
    }
    const std::vector<Vec> u0 = offset_control(
        res.normalized, res.ric, res.aux, res.optimum->lambda_star);
    write_text_file((dir / "u0_path.csv").string(),
                    vector_path_csv(res.normalized.grid, u0, "u"));
  }
  std::cout << "solve: value=" << res.optimum->value_psi << " d*=[";
  for (Eigen::Index i = 0; i < res.optimum->d_star.size(); ++i) {
    std::cout << (i ? "," : "") << res.optimum->d_star(i);
  }
  std::cout << "]\n";
  return 0;
}

int run_simulate(CommonOpts& o, SimOpts& s) {
  const fs::path dir = ensure_out_dir(o);
  const ProblemSpec spec = load_problem_file(o.input);
  const SolveResult res = solve_pipeline(spec, {o.substeps, o.quad_refine});

  SimulationConfig cfg;
  cfg.n_paths = s.paths;
  cfg.n_steps = choose_sim_steps(res.normalized.grid, s.steps);
  cfg.master_seed = s.seed;
  cfg.antithetic = s.antithetic;
  cfg.n_threads = o.resolved_threads();

  const ControlLaw law = ControlLaw::from_feedback(*res.feedback);
  const SimulationReport rep = simulate(res.normalized, law, cfg);

  Json j = solve_report_json(res);
  j["status"] = "ok";
  j["command"] = "simulate";
  j["simulation"] = simulation_report_json(rep, cfg);
  write_report(dir, j);
  if (s.dump_paths > 0) {
    write_text_file((dir / "paths.csv").string(),
                    paths_csv(res.normalized, law, cfg, s.dump_paths));
  }
  std::cout << "simulate: cost=" << rep.cost << " se=" << rep.se_cost
            << " value=" << res.optimum->value_psi << "\n";
  return 0;
}

int run_mv(CommonOpts& o, double sigma3_override) {
  const fs::path dir = ensure_out_dir(o);
  MVModel mv = load_mv_file(o.input);
  if (sigma3_override > 0.0) {
    if (mv.dim() < 3) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--sigma3 needs at least three assets");
    }
    mv.sigma(2) = sigma3_override;
  }
  const ProblemSpec spec = build_mv_spec(mv);
  const SolveResult res = solve_pipeline(spec, {o.substeps, o.quad_refine});
  const MVClosedForm cf = closed_form_value(mv, res.ric.P.front());
  const DiagonalSensitivity sens = diagonal_sensitivity(mv, 1e-3, o.substeps);

  Json j = solve_report_json(res);
  j["status"] = "ok";
  j["command"] = "mv";
  j["market"] = mv_to_json(mv);
  j["closed_form"] = {
      {"Phi_shifted", mat_to_json(cf.PhiS)},
      {"phi", vec_to_json(cf.phi)},
      {"d_star", vec_to_json(cf.d_star)},
      {"lambda_star", vec_to_json(cf.lambda_star)},
      {"value_display", cf.value_display},
      {"objective", cf.objective},
      {"predicate_shifted_form", cf.predicate},
      {"predicate_general_form", res.verdicts.type2},
      {"pipeline_value_display", -res.optimum->value_psi},
      {"pipeline_objective",
       mv.upsilon.dot(Vec(mv.Sigma.inverse() * mv.upsilon)) -
           res.optimum->value_psi},
  };
  j["diagonal_sensitivity"] = {
      {"d11", sens.d11}, {"d22", sens.d22}, {"d33", sens.d33}};
  write_report(dir, j);
  std::cout << "mv: objective=" << cf.objective << " (pipeline "
            << -res.optimum->value_psi << ")\n";
  return 0;
}

int run_sweep(CommonOpts& o, const std::string& element, double from,
              double to, int points) {
  const fs::path dir = ensure_out_dir(o);
  MVModel mv = load_mv_file(o.input);

  int row = 0;
  int col = 0;
  if (std::sscanf(element.c_str(), "%d,%d", &row, &col) != 2 || row < 1 ||
      col < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "--element must be 'i,j' with 1-based indices");
  }
  const SweepResult res =
      sweep(mv, row - 1, col - 1, linspace(from, to, points), o.substeps);

  Json j = sweep_report_json(res);
  j["status"] = "ok";
  j["command"] = "sweep";
  write_report(dir, j);
  write_text_file((dir / "sweep.csv").string(), sweep_csv(res));
  std::cout << "sweep: " << points << " points, skipped " << res.skipped_count
            << std::boolalpha
            << ", monotone_decreasing=" << res.monotone_decreasing
            << ", interior_minimum=" << res.interior_minimum << "\n";
  return 0;
}

int fail(const CommonOpts& o, const Error& e) {
  Json j;
  j["status"] = "error";
  j["reason"] = std::string(to_string(e.code()));
  j["detail"] = e.detail();
  std::cerr << j.dump() << "\n";
  if (!o.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(o.out_dir, ec);
    try {
      write_report(fs::path(o.out_dir), j);
    } catch (const Error&) {
    }
  }
  return e.is_input_error() ? 1 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic linear-quadratic control with a terminal "
               "mean-field cost: check, solve, simulate, mean-variance"};
  app.require_subcommand(1);

  CommonOpts check_o, solve_o, sim_o, mv_o, sweep_o;
  SimOpts sim_s;
  bool dump_p = false;
  bool dump_aux = false;
  double sigma3 = 0.0;
  std::string element;
  double from = 0.0;
  double to = 0.0;
  int points = 15;

  CLI::App* c_check =
      app.add_subcommand("check", "validate, classify and certify a problem");
  add_common(c_check, check_o);

  CLI::App* c_solve =
      app.add_subcommand("solve", "full dual solve with feedback synthesis");
  add_common(c_solve, solve_o);
  c_solve->add_flag("--dump-p", dump_p, "write the Riccati path CSV");
  c_solve->add_flag("--dump-aux", dump_aux, "write H0/K0/u0 path CSVs");

  CLI::App* c_sim = app.add_subcommand(
      "simulate", "solve, then verify by Euler-Maruyama Monte Carlo");
  add_common(c_sim, sim_o);
  c_sim->add_option("--paths", sim_s.paths, "Monte Carlo paths")
      ->check(CLI::PositiveNumber);
  c_sim->add_option("--steps", sim_s.steps,
                    "simulation steps (multiple of grid steps)");
  c_sim->add_option("--seed", sim_s.seed, "master seed");
  c_sim->add_flag("--antithetic", sim_s.antithetic, "antithetic pairs");
  c_sim->add_option("--dump-paths", sim_s.dump_paths,
                    "write the first K sample paths to paths.csv");

  CLI::App* c_mv = app.add_subcommand(
      "mv", "solve a mean-variance market file and report the closed form");
  add_common(c_mv, mv_o);
  c_mv->add_option("--sigma3", sigma3,
                   "override the third asset volatility (e.g. 0.30)");

  CLI::App* c_sweep = app.add_subcommand(
      "sweep", "vary one risk-aversion entry and tabulate the objective");
  add_common(c_sweep, sweep_o);
  c_sweep->add_option("--element", element, "1-based 'i,j' entry of Sigma")
      ->required();
  c_sweep->add_option("--from", from, "first value")->required();
  c_sweep->add_option("--to", to, "last value")->required();
  c_sweep->add_option("--points", points, "sample count")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  CommonOpts* active = nullptr;
  try {
    if (c_check->parsed()) {
      active = &check_o;
      return run_check(check_o);
    }
    if (c_solve->parsed()) {
      active = &solve_o;
      return run_solve(solve_o, dump_p, dump_aux);
    }
    if (c_sim->parsed()) {
      active = &sim_o;
      return run_simulate(sim_o, sim_s);
    }
    if (c_mv->parsed()) {
      active = &mv_o;
      return run_mv(mv_o, sigma3);
    }
    if (c_sweep->parsed()) {
      active = &sweep_o;
      return run_sweep(sweep_o, element, from, to, points);
    }
  } catch (const Error& e) {
    static const CommonOpts fallback;
    return fail(active != nullptr ? *active : fallback, e);
  } catch (const std::exception& e) {
    std::cerr << R"({"status":"error","reason":"internal","detail":")"
              << e.what() << "\"}\n";
    return 2;
  }
  return 1;
}
