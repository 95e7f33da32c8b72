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

#include "slqmf/grid.hpp"
#include "slqmf/linalg.hpp"
#include "slqmf/paths.hpp"

namespace slqmf {

/// Coefficients of the controlled linear SDE
///   dX = (A X + B u + a) dt + (C X + D u + b) dW
/// with a one-dimensional Brownian driver. All paths are piecewise constant
/// on the grid cells.
struct DynamicsSpec {
  int n = 0;  ///< state dimension
  int m = 0;  ///< control dimension
  MatrixPath A;  ///< n x n
  MatrixPath B;  ///< n x m
  MatrixPath C;  ///< n x n
  MatrixPath D;  ///< n x m
  VectorPath a;  ///< n
  VectorPath b;  ///< n
};

/// Quadratic cost data:
///   J(x;u) = E{ int_0^T <Q(X-q),X-q> + <R(u-p),u-p> dt
///               + <G(X(T)-xi), X(T)-xi>
///               + <Gbar(E[X(T)]-eta), E[X(T)]-eta> }.
/// After normalize(), p == 0 and the mean-field term is carried in the
/// reduced form  <Gbar E[X], E[X]> - 2 <zeta, E[X]>  with zeta = Gbar*eta
/// and the dropped additive constant <Gbar eta, eta> recorded in cost_shift
/// (unnormalized cost = normalized cost + cost_shift).
struct CostSpec {
  MatrixPath Q;  ///< n x n, PSD on every cell
  MatrixPath R;  ///< m x m, PSD on every cell
  Mat G;         ///< n x n symmetric
  Mat Gbar;      ///< n x n symmetric
  VectorPath q;  ///< n
  VectorPath p;  ///< m
  Vec xi;        ///< n
  Vec eta;       ///< n
  Vec zeta;      ///< n, = Gbar * eta once normalized
  double cost_shift = 0.0;
  bool normalized = false;
};

struct ProblemSpec {
  TimeGrid grid;
  DynamicsSpec dyn;
  CostSpec cost;
  Vec x0;
};

/// Which standing assumption set the instance satisfies. Standard needs R
/// uniformly positive definite (and G PSD); Singular needs G and D^T D
/// uniformly positive definite. Q and R must be PSD in all cases. Neither
/// means no covered theory applies and solving must refuse.
struct CaseTag {
  enum class Variant { kStandard, kSingular, kBoth, kNeither };

  Variant variant = Variant::kNeither;
  double delta_R = 0.0;    ///< min over cells of lambda_min(R)
  double delta_G = 0.0;    ///< lambda_min(G)
  double delta_DtD = 0.0;  ///< min over cells of lambda_min(D^T D)

  bool standard() const {
    return variant == Variant::kStandard || variant == Variant::kBoth;
  }
  bool singular() const {
    return variant == Variant::kSingular || variant == Variant::kBoth;
  }
  bool covered() const { return variant != Variant::kNeither; }
};

const char* to_string(CaseTag::Variant v);

/// Checks dimensions, symmetry (within kSymTol) and the standing positivity
/// assumptions; returns the strongest case tag the instance supports. The
/// input is never modified.
CaseTag validate(const ProblemSpec& spec);

/// Applies the two cost normalizations: the control relabeling that removes
/// p (a <- a + B p, b <- b + D p, p <- 0) and the reduction of the
/// mean-field term to its zeta form. Idempotent.
ProblemSpec normalize(const ProblemSpec& spec);

/// Symmetrizes Q/R/G/Gbar in place after an asymmetry check; shared by
/// validate() and the JSON loader.
void canonicalize_symmetric(ProblemSpec& spec);

}  // namespace slqmf
