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

#ifndef SRBF_SOLVER_HPP
#define SRBF_SOLVER_HPP

#include "srbf/conic.hpp"
#include "srbf/robust.hpp"
#include "srbf/srmodel.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace srbf {

struct SolverParams {
  double eps_s = 1e-8;          // conic solution accuracy
  double penalty_rho = 10.0;
  double eta = 1.0;             // proximal weight, applied with W in watts
  double rank_gap_tol = 1e-6;   // absolute, on sum_k (||W_k||_* - ||W_k||_2) in watts
  int max_dc_iters = 50;
  int randomization_count = 1000;
  double rank1_extract_tol = 1e-4;
  double rank_ratio_tol = 1e-6;  // lambda_2 / lambda_1 at or below this is rank one
  std::uint64_t randomization_seed = 0;
  ConicSolverParams conic;
};

enum class SolutionStatus { optimal, infeasible, rank_recovery_failed, inaccurate };

const char* to_string(SolutionStatus s) noexcept;

struct SolverDiagnostics {
  ConicStatus sdr_status = ConicStatus::inaccurate;
  int conic_iterations = 0;  // summed over every conic solve
  int dc_iterations = 0;
  double final_rank_gap = 0.0;
  bool randomization_used = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;
  double cone_violation = 0.0;
  double complexity_estimate = 0.0;
  std::vector<double> rank_gap_trace;       // per accepted DC iterate, starting at W_init
  std::vector<double> penalized_objective;  // sum tr W + rho * rank gap, same indexing
};

struct BeamformingSolution {
  SolutionStatus status = SolutionStatus::inaccurate;
  BeamformerSet w;
  std::vector<HermitianMatrix> W;
  std::vector<double> mu;
  double total_power = 0.0;
  SolverDiagnostics diagnostics;
};

/// Variable layout of the assembled programs. W_k = power_scale * X_k with X_k
/// stored in HermitianBasis(M) coordinates; mu_k = sigma_k^2 * mu_scaled_k.
struct P3Layout {
  int M = 0;
  int K = 0;
  double power_scale = 1.0;
  std::vector<double> sigma2;

  int w_offset(int k) const noexcept { return k * M * M; }
  int mu_index(int k) const noexcept { return K * M * M + k; }
  int base_variables() const noexcept { return K * M * M + K; }

  std::vector<HermitianMatrix> lifted(const RVector& x) const;
  std::vector<double> slacks(const RVector& x) const;
  RVector coordinates(const std::vector<HermitianMatrix>& W, const std::vector<double>& mu) const;
};

P3Layout make_layout(const RobustProblemData& data);

/// Rank-relaxed power minimization: K PSD blocks W_k (dim M), K LMI blocks
/// (dim M+1), K IoT trace inequalities and K nonnegative slacks. Each user's
/// constraints are divided by sigma_k^2.
ConicProgram assemble_p3(const RobustProblemData& data, const P3Layout& layout);

/// Convex DC subproblem around W_prev: objective
/// sum_k [(1 + rho) tr W_k - <W_k, rho z z^H + eta W_prev_k>] + (eta/2) sum_k ||W_k||_F^2,
/// the quadratic carried by an epigraph variable in a second-order cone.
ConicProgram assemble_p6(const RobustProblemData& data, const P3Layout& layout,
                         const std::vector<HermitianMatrix>& W_prev, const SolverParams& params);

/// sum_k (||W_k||_* - ||W_k||_2), equal to tr W_k - lambda_max(W_k) for PSD W_k.
double rank_gap(const std::vector<HermitianMatrix>& W);

/// sum_k tr W_k + rho * rank_gap(W).
double penalized_objective(const std::vector<HermitianMatrix>& W, double rho);

struct DcResult {
  std::vector<HermitianMatrix> W;
  std::vector<double> mu;
  int iterations = 0;
  bool converged = false;
  std::vector<double> rank_gap_trace;
  std::vector<double> penalized_objective;
  int conic_iterations = 0;
};

/// Iterates the DC subproblem from a start feasible for the relaxed program. An iterate is
/// accepted only if it does not raise the penalized objective by more than
/// 1e-9; the loop stops at rank_gap_tol or max_dc_iters.
/// Throws Error(subproblem_infeasible) if a subproblem is reported infeasible.
DcResult dc_refine(const std::vector<HermitianMatrix>& W_init, const std::vector<double>& mu_init,
                   const RobustProblemData& data, const SolverParams& params);

struct RandomizationResult {
  BeamformerSet w;
  std::vector<double> mu;
  int candidate = 0;  // 0 is the leading-eigenvector candidate
  double scale = 1.0;
};

/// Deterministic surrogate check: every LMI block PSD for some mu_k >= 0
/// (golden-section search on its minimum eigenvalue) and every IoT trace
/// expression >= 0. Writes the chosen slacks to `mu` when non-null.
bool surrogate_feasible(const BeamformerSet& w, const RobustProblemData& data,
                        std::vector<double>* mu = nullptr);

/// Gaussian randomization around W_star; Error(no_feasible_candidate) if no
/// candidate becomes feasible within a common scale factor of 1e3.
RandomizationResult gaussian_randomization(const std::vector<HermitianMatrix>& W_star,
                                           const RobustProblemData& data,
                                           const SolverParams& params, std::uint64_t seed);

/// sqrt(lambda_1) zeta_1; Error(not_rank_one) if ||W - w w^H||_F > tol max(1, ||W||_F).
CVector extract_beamformer(const HermitianMatrix& W, double tol);

/// Full pipeline on given direct links and covariances.
BeamformingSolution minimize_power(const CMatrix& f, const CovarianceSet& cov,
                                   const SystemConfig& cfg, const SolverParams& params = {});

enum class CovarianceSource { exact, doa };

/// Convenience overload: builds the covariances from `chs` (exact) or from
/// the DoA description in `cfg`.
BeamformingSolution minimize_power(const ChannelSet& chs, const SystemConfig& cfg,
                                   CovarianceSource source, const SolverParams& params = {});

/// Interior-point cost bound for the relaxed program with n = K M^2,
/// multiplied by (1 + dc_iters).
double complexity_estimate(int M, int K, double eps_s, int dc_iters);

}  // namespace srbf

#endif  // SRBF_SOLVER_HPP
