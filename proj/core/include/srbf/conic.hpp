// SPDX-License-Identifier: Apache-2.0
//
// srbf - robust transmit beamforming for symbiotic radio
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SRBF_CONIC_HPP
#define SRBF_CONIC_HPP

#include "srbf/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace srbf {

/// F0 + sum_j x_j F_j in the cone of Hermitian PSD matrices of size `dim`.
/// A scalar inequality is a block of size 1.
struct PsdConstraint {
  int dim = 0;
  CMatrix constant;
  std::vector<std::pair<int, CMatrix>> terms;  // (variable, Hermitian coefficient)
};

/// g0 + sum_j x_j g_j in the second-order cone {u : u_0 >= ||u_{1:}||}.
struct SocConstraint {
  int dim = 0;
  RVector constant;
  std::vector<std::pair<int, RVector>> terms;
};

/// minimize c^T x over free real variables x subject to conic constraints.
class ConicProgram {
 public:
  /// Appends `count` free variables and returns the index of the first one.
  int add_variables(int count);
  int variables() const noexcept { return static_cast<int>(objective_.size()); }

  void set_objective(int var, double coef);
  const RVector& objective() const noexcept { return objective_; }

  /// Returns the constraint index. Coefficients must be Hermitian.
  int add_psd(PsdConstraint con);
  int add_soc(SocConstraint con);

  /// Helpers for the common cases.
  void add_nonnegative(int var);                  // x_var >= 0
  void add_linear_geq(double constant,            // constant + a^T x >= 0
                      const std::vector<std::pair<int, double>>& coefs);

  const std::vector<PsdConstraint>& psd() const noexcept { return psd_; }
  const std::vector<SocConstraint>& soc() const noexcept { return soc_; }

  /// Throws Error(dimension_mismatch) on malformed data.
  void check() const;

 private:
  RVector objective_;
  std::vector<PsdConstraint> psd_;
  std::vector<SocConstraint> soc_;
};

enum class ConicStatus { optimal, infeasible, unbounded, inaccurate };

const char* to_string(ConicStatus s) noexcept;

struct ConicSolverParams {
  double feastol = 1e-8;   // relative primal and dual residual
  double gap_tol = 1e-8;   // relative duality gap
  int max_iters = 100;
  bool verbose = false;
};

struct ConicSolution {
  ConicStatus status = ConicStatus::inaccurate;
  RVector x;
  std::vector<CMatrix> psd_slack;  // F0 + A(x) per PSD constraint
  std::vector<CMatrix> psd_dual;
  std::vector<RVector> soc_slack;
  std::vector<RVector> soc_dual;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;  // relative
  double dual_residual = 0.0;    // relative
  double gap = 0.0;              // <s, z>
  double cone_violation = 0.0;   // max(0, -lambda_min) of F0 + A(x) over all blocks
  int iterations = 0;
};

/// Homogeneous self-dual primal-dual interior-point method with
/// Nesterov-Todd scaling and a Mehrotra predictor-corrector step.
/// Deterministic for fixed inputs.
ConicSolution conic_solve(const ConicProgram& prog, const ConicSolverParams& params = {});

}  // namespace srbf

#endif  // SRBF_CONIC_HPP
