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

#include <json.hpp>
#include <string>

#include "slqmf/portfolio.hpp"
#include "slqmf/simulate.hpp"
#include "slqmf/solver.hpp"

namespace slqmf {

using Json = nlohmann::json;

/// Problem files carry {horizon, steps, n, m, x0, A, B, C, D, a, b, Q, R,
/// G, Gbar, q, p, xi, eta}. Matrices are either a flat row-major array, an
/// array of rows, or a list with one matrix per grid cell; vectors are a
/// flat array or a list with one vector per cell. The data terms a, b, q,
/// p, xi, eta may be omitted and default to zero.
ProblemSpec problem_from_json(const Json& j);
ProblemSpec load_problem_file(const std::string& path);
Json problem_to_json(const ProblemSpec& spec);

/// Market files carry {horizon, steps, mu, sigma, upsilon, Sigma, x0}.
MVModel mv_from_json(const Json& j);
MVModel load_mv_file(const std::string& path);
Json mv_to_json(const MVModel& mv);

Json vec_to_json(const Vec& v);
Json mat_to_json(const Mat& m);

/// Report payloads; no timestamps, fully determined by the inputs.
Json solve_report_json(const SolveResult& res);
Json simulation_report_json(const SimulationReport& rep,
                            const SimulationConfig& cfg);
Json sweep_report_json(const SweepResult& res);

/// CSV emitters. P columns are the row-major upper triangle.
std::string p_path_csv(const RiccatiSolution& ric);
std::string vector_path_csv(const TimeGrid& grid,
                            const std::vector<Vec>& nodes,
                            const std::string& prefix);
std::string sweep_csv(const SweepResult& res);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace slqmf
