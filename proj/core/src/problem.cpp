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

#include "slqmf/problem.hpp"

#include <algorithm>
#include <limits>

namespace slqmf {

const char* to_string(CaseTag::Variant v) {
  switch (v) {
    case CaseTag::Variant::kStandard: return "standard";
    case CaseTag::Variant::kSingular: return "singular";
    case CaseTag::Variant::kBoth: return "both";
    case CaseTag::Variant::kNeither: return "neither";
  }
  return "unknown";
}

namespace {

void check_dimensions(const ProblemSpec& spec) {
  const int n = spec.dyn.n;
  const int m = spec.dyn.m;
  if (n < 1 || m < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "n and m must be positive");
  }
  const TimeGrid& g = spec.grid;
  spec.dyn.A.check(g, n, n, "A");
  spec.dyn.B.check(g, n, m, "B");
  spec.dyn.C.check(g, n, n, "C");
  spec.dyn.D.check(g, n, m, "D");
  spec.dyn.a.check(g, n, "a");
  spec.dyn.b.check(g, n, "b");
  spec.cost.Q.check(g, n, n, "Q");
  spec.cost.R.check(g, m, m, "R");
  if (spec.cost.G.rows() != n || spec.cost.G.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "G must be n x n");
  }
  if (spec.cost.Gbar.rows() != n || spec.cost.Gbar.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "Gbar must be n x n");
  }
  spec.cost.q.check(g, n, "q");
  spec.cost.p.check(g, m, "p");
  if (spec.cost.xi.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "xi must have size n");
  }
  if (spec.cost.eta.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "eta must have size n");
  }
  if (spec.x0.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "x0 must have size n");
  }
}

}  // namespace

void canonicalize_symmetric(ProblemSpec& spec) {
  for (Mat& q : spec.cost.Q.cells()) q = require_symmetric(q, "Q");
  for (Mat& r : spec.cost.R.cells()) r = require_symmetric(r, "R");
  spec.cost.G = require_symmetric(spec.cost.G, "G");
  spec.cost.Gbar = require_symmetric(spec.cost.Gbar, "Gbar");
}

CaseTag validate(const ProblemSpec& spec) {
  check_dimensions(spec);

  // Reject asymmetry without mutating the caller's spec.
  for (const Mat& q : spec.cost.Q.cells()) require_symmetric(q, "Q");
  for (const Mat& r : spec.cost.R.cells()) require_symmetric(r, "R");
  require_symmetric(spec.cost.G, "G");
  require_symmetric(spec.cost.Gbar, "Gbar");

  CaseTag tag;
  double min_eig_Q = std::numeric_limits<double>::infinity();
  for (const Mat& q : spec.cost.Q.cells()) {
    min_eig_Q = std::min(min_eig_Q, min_eig(symmetrize(q)));
  }
  tag.delta_R = std::numeric_limits<double>::infinity();
  for (const Mat& r : spec.cost.R.cells()) {
    tag.delta_R = std::min(tag.delta_R, min_eig(symmetrize(r)));
  }
  tag.delta_G = min_eig(symmetrize(spec.cost.G));
  tag.delta_DtD = std::numeric_limits<double>::infinity();
  for (const Mat& d : spec.dyn.D.cells()) {
    tag.delta_DtD = std::min(tag.delta_DtD, min_eig(d.transpose() * d));
  }

  const bool q_psd = min_eig_Q >= -kPsdTol;
  const bool r_psd = tag.delta_R >= -kPsdTol;
  const bool g_psd = tag.delta_G >= -kPsdTol;
  const bool standard = q_psd && r_psd && g_psd && tag.delta_R >= kPsdTol;
  const bool singular = q_psd && r_psd && tag.delta_G >= kPsdTol &&
                        tag.delta_DtD >= kPsdTol;

  if (standard && singular) {
    tag.variant = CaseTag::Variant::kBoth;
  } else if (standard) {
    tag.variant = CaseTag::Variant::kStandard;
  } else if (singular) {
    tag.variant = CaseTag::Variant::kSingular;
  } else {
    tag.variant = CaseTag::Variant::kNeither;
  }
  return tag;
}

ProblemSpec normalize(const ProblemSpec& spec) {
  ProblemSpec out = spec;
  canonicalize_symmetric(out);

  // Fold p into the drift and diffusion offsets, cell by cell. The shifted
  // control u - p becomes the new control variable.
  if (!out.cost.p.is_zero()) {
    const int cells = out.grid.n_steps();
    std::vector<Vec> a_new(static_cast<size_t>(cells));
    std::vector<Vec> b_new(static_cast<size_t>(cells));
    for (int k = 0; k < cells; ++k) {
      const Vec& p = out.cost.p.at_cell(k);
      a_new[static_cast<size_t>(k)] =
          out.dyn.a.at_cell(k) + out.dyn.B.at_cell(k) * p;
      b_new[static_cast<size_t>(k)] =
          out.dyn.b.at_cell(k) + out.dyn.D.at_cell(k) * p;
    }
    out.dyn.a = VectorPath::per_cell(std::move(a_new));
    out.dyn.b = VectorPath::per_cell(std::move(b_new));
    out.cost.p = VectorPath::zero(out.dyn.m);
  }

  out.cost.zeta = out.cost.Gbar * out.cost.eta;
  out.cost.cost_shift = out.cost.eta.dot(out.cost.Gbar * out.cost.eta);
  out.cost.normalized = true;
  return out;
}

}  // namespace slqmf
