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

#include "srbf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace srbf {

namespace {

// Conic solves that stop short of the target accuracy are still usable when
// both residuals are this small; the caller re-verifies feasibility anyway.
constexpr double kUsableResidual = 1e-6;

bool usable(const ConicSolution& sol) {
  if (sol.status == ConicStatus::optimal) return true;
  return sol.status == ConicStatus::inaccurate && sol.primal_residual <= kUsableResidual &&
         sol.dual_residual <= kUsableResidual;
}

void add_p3_constraints(ConicProgram& prog, const RobustProblemData& data, const P3Layout& L) {
  const HermitianBasis basis(data.M);
  const int nb = basis.size();
  for (int k = 0; k < data.K(); ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double sigma2 = data.users[kk].sigma2;
    const double wscale = L.power_scale / sigma2;

    PsdConstraint psd;
    psd.dim = data.M;
    psd.constant = CMatrix::Zero(data.M, data.M);
    for (int j = 0; j < nb; ++j) psd.terms.emplace_back(L.w_offset(k) + j, basis.element(j));
    prog.add_psd(std::move(psd));

    const CMatrix T = lmi_transform(data, k);
    PsdConstraint lmi;
    lmi.dim = data.M + 1;
    lmi.constant = lmi_constant(data, k).mat() / sigma2;
    for (int i = 0; i < data.K(); ++i) {
      const double w = wscale * lmi_weight(data, k, i);
      for (int j = 0; j < nb; ++j) {
        CMatrix F = w * (T.adjoint() * basis.element(j) * T);
        lmi.terms.emplace_back(L.w_offset(i) + j, 0.5 * (F + F.adjoint()));
      }
    }
    lmi.terms.emplace_back(L.mu_index(k), lmi_mu_coef(data, k).mat());
    prog.add_psd(std::move(lmi));

    std::vector<std::pair<int, double>> iot;
    for (int i = 0; i < data.K(); ++i) {
      const CMatrix G = iot_coef(data, k, i).mat();
      for (int j = 0; j < nb; ++j) {
        const double a = wscale * (basis.element(j).conjugate().cwiseProduct(G)).sum().real();
        iot.emplace_back(L.w_offset(i) + j, a);
      }
    }
    prog.add_linear_geq(-1.0, iot);
    prog.add_nonnegative(L.mu_index(k));
  }
}

std::vector<double> eigenvalues_desc(const HermitianMatrix& W) {
  const HermitianEig eig = hermitian_eig(W);
  std::vector<double> v(eig.values.data(), eig.values.data() + eig.values.size());
  std::reverse(v.begin(), v.end());
  return v;
}

bool is_rank_one(const HermitianMatrix& W, double ratio_tol) {
  const std::vector<double> ev = eigenvalues_desc(W);
  if (ev.empty() || ev[0] <= 0.0) return true;  // zero matrix
  if (ev.size() < 2) return true;
  return std::max(0.0, ev[1]) <= ratio_tol * ev[0];
}

void fill_conic_diagnostics(const ConicSolution& sol, SolverDiagnostics& d) {
  d.primal_residual = sol.primal_residual;
  d.dual_residual = sol.dual_residual;
  d.duality_gap = sol.gap;
  d.cone_violation = sol.cone_violation;
}

// lambda_min of the noise-normalized LMI block as a function of mu_k.
struct LmiSection {
  HermitianMatrix base;  // block at mu = 0, divided by sigma^2
  HermitianMatrix coef;  // d block / d mu_scaled
  double mu_max = 0.0;

  double eval(double mu) const { return min_eigenvalue(base + coef * mu); }
};

// Golden-section search for the mu maximizing the (concave) minimum eigenvalue.
std::pair<double, double> best_mu(const LmiSection& sec) {
  if (sec.mu_max <= 0.0) return {0.0, sec.eval(0.0)};
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0;
  double b = sec.mu_max;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = sec.eval(c);
  double fd = sec.eval(d);
  for (int it = 0; it < 80 && (b - a) > 1e-12 * std::max(1.0, sec.mu_max); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = sec.eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = sec.eval(d);
    }
  }
  double mu = 0.5 * (a + b);
  double best = sec.eval(mu);
  for (double cand : {0.0, sec.mu_max}) {
    const double v = sec.eval(cand);
    if (v > best) {
      best = v;
      mu = cand;
    }
  }
  return {mu, best};
}

std::vector<HermitianMatrix> outer_products(const BeamformerSet& w) {
  std::vector<HermitianMatrix> W;
  for (int k = 0; k < w.users(); ++k) W.push_back(HermitianMatrix::outer(w.w.col(k)));
  return W;
}

// Smallest common power scale t >= 1 putting every IoT trace expression at or
// above a 1e-8 relative margin. Scaling W and mu by t keeps each LMI block
// PSD, since block(tW, t mu) = t block(W, mu) + (t - 1) sigma^2 e e^T.
double iot_polish_scale(const std::vector<HermitianMatrix>& W, const RobustProblemData& data) {
  double t = 1.0;
  for (int k = 0; k < data.K(); ++k) {
    const double sigma2 = data.users[static_cast<std::size_t>(k)].sigma2;
    const double a = iot_trace_lhs(W, data, k) + sigma2;
    if (a > 0.0) t = std::max(t, (1.0 + 1e-8) * sigma2 / a);
  }
  return t;
}

}  // namespace

const char* to_string(SolutionStatus s) noexcept {
  switch (s) {
    case SolutionStatus::optimal: return "optimal";
    case SolutionStatus::infeasible: return "infeasible";
    case SolutionStatus::rank_recovery_failed: return "rank_recovery_failed";
    case SolutionStatus::inaccurate: return "inaccurate";
  }
  return "unknown";
}

std::vector<HermitianMatrix> P3Layout::lifted(const RVector& x) const {
  const HermitianBasis basis(M);
  std::vector<HermitianMatrix> W;
  for (int k = 0; k < K; ++k) {
    W.emplace_back(CMatrix(power_scale * basis.to_matrix(x.data() + w_offset(k))));
  }
  return W;
}

std::vector<double> P3Layout::slacks(const RVector& x) const {
  std::vector<double> mu;
  for (int k = 0; k < K; ++k) {
    mu.push_back(std::max(0.0, x(mu_index(k))) * sigma2[static_cast<std::size_t>(k)]);
  }
  return mu;
}

RVector P3Layout::coordinates(const std::vector<HermitianMatrix>& W,
                              const std::vector<double>& mu) const {
  const HermitianBasis basis(M);
  RVector x = RVector::Zero(base_variables());
  for (int k = 0; k < K; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    x.segment(w_offset(k), M * M) = basis.to_coords(W[kk].mat()) / power_scale;
    x(mu_index(k)) = mu[kk] / sigma2[kk];
  }
  return x;
}

P3Layout make_layout(const RobustProblemData& data) {
  P3Layout L;
  L.M = data.M;
  L.K = data.K();
  // Single-user interference-free power for the cellular target: keeps the
  // scaled lifted variables of order one.
  double scale = 0.0;
  for (const auto& u : data.users) {
    L.sigma2.push_back(u.sigma2);
    const double f2 = u.f.squaredNorm();
    if (f2 > 0.0) scale = std::max(scale, u.gamma_s * u.sigma2 / f2);
  }
  L.power_scale = scale > 0.0 ? scale : 1.0;
  return L;
}

ConicProgram assemble_p3(const RobustProblemData& data, const P3Layout& layout) {
  ConicProgram prog;
  prog.add_variables(layout.base_variables());
  for (int k = 0; k < data.K(); ++k) {
    for (int j = 0; j < data.M; ++j) prog.set_objective(layout.w_offset(k) + j, 1.0);
  }
  add_p3_constraints(prog, data, layout);
  return prog;
}

ConicProgram assemble_p6(const RobustProblemData& data, const P3Layout& layout,
                         const std::vector<HermitianMatrix>& W_prev, const SolverParams& params) {
  if (static_cast<int>(W_prev.size()) != data.K()) {
    throw Error(ErrorCode::dimension_mismatch, "one previous iterate per user");
  }
  const HermitianBasis basis(data.M);
  const int nb = basis.size();
  const double rho = params.penalty_rho;
  const double eta = params.eta;
  const double omega = layout.power_scale;

  ConicProgram prog;
  prog.add_variables(layout.base_variables());
  const int t = prog.add_variables(1);

  // Objective divided by omega, with W_k = omega X_k:
  // (1 + rho) tr X_k - <X_k, rho z z^H + eta W_prev_k> + t, t >= (eta omega / 2) ||X||_F^2.
  for (int k = 0; k < data.K(); ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const EigPair top = leading_eigpair(W_prev[kk]);
    const CMatrix lin = rho * (top.vector * top.vector.adjoint()) + eta * W_prev[kk].mat();
    for (int j = 0; j < nb; ++j) {
      double coef = basis.is_diagonal(j) ? 1.0 + rho : 0.0;
      coef -= (basis.element(j).conjugate().cwiseProduct(lin)).sum().real();
      prog.set_objective(layout.w_offset(k) + j, coef);
    }
  }
  prog.set_objective(t, 1.0);
  add_p3_constraints(prog, data, layout);

  // ((1 + y)/2, (1 - y)/2, x) in the cone  <=>  y >= ||x||^2, with y = 2 t / (eta omega).
  const int nx = data.K() * nb;
  SocConstraint soc;
  soc.dim = 2 + nx;
  soc.constant = RVector::Zero(soc.dim);
  soc.constant(0) = 0.5;
  soc.constant(1) = 0.5;
  RVector gt = RVector::Zero(soc.dim);
  gt(0) = 1.0 / (eta * omega);
  gt(1) = -1.0 / (eta * omega);
  soc.terms.emplace_back(t, gt);
  for (int j = 0; j < nx; ++j) {
    RVector g = RVector::Zero(soc.dim);
    g(2 + j) = 1.0;
    soc.terms.emplace_back(j, g);
  }
  prog.add_soc(std::move(soc));
  return prog;
}

double rank_gap(const std::vector<HermitianMatrix>& W) {
  double gap = 0.0;
  for (const auto& Wk : W) {
    const std::vector<double> ev = eigenvalues_desc(Wk);
    double nuclear = 0.0;
    for (double v : ev) nuclear += std::abs(v);
    gap += nuclear - std::max(std::abs(ev.front()), std::abs(ev.back()));
  }
  return gap;
}

double penalized_objective(const std::vector<HermitianMatrix>& W, double rho) {
  double power = 0.0;
  for (const auto& Wk : W) power += Wk.trace();
  return power + rho * rank_gap(W);
}

DcResult dc_refine(const std::vector<HermitianMatrix>& W_init, const std::vector<double>& mu_init,
                   const RobustProblemData& data, const SolverParams& params) {
  const P3Layout layout = make_layout(data);
  DcResult res;
  res.W = W_init;
  res.mu = mu_init;
  double gap = rank_gap(res.W);
  double pen = penalized_objective(res.W, params.penalty_rho);
  res.rank_gap_trace.push_back(gap);
  res.penalized_objective.push_back(pen);
  if (gap <= params.rank_gap_tol) {
    res.converged = true;
    return res;
  }

  ConicSolverParams cp = params.conic;
  cp.gap_tol = params.eps_s;
  for (int t = 1; t <= params.max_dc_iters; ++t) {
    const ConicSolution sol = conic_solve(assemble_p6(data, layout, res.W, params), cp);
    res.conic_iterations += sol.iterations;
    if (sol.status == ConicStatus::infeasible) {
      throw Error(ErrorCode::subproblem_infeasible, "DC subproblem reported infeasible");
    }
    if (!usable(sol)) break;
    std::vector<HermitianMatrix> W_next = layout.lifted(sol.x);
    const double pen_next = penalized_objective(W_next, params.penalty_rho);
    if (pen_next > pen + 1e-9) break;
    res.W = std::move(W_next);
    res.mu = layout.slacks(sol.x);
    res.iterations = t;
    gap = rank_gap(res.W);
    pen = pen_next;
    res.rank_gap_trace.push_back(gap);
    res.penalized_objective.push_back(pen);
    if (gap <= params.rank_gap_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

bool surrogate_feasible(const BeamformerSet& w, const RobustProblemData& data,
                        std::vector<double>* mu) {
  const std::vector<HermitianMatrix> W = outer_products(w);
  std::vector<double> chosen;
  for (int k = 0; k < data.K(); ++k) {
    const double sigma2 = data.users[static_cast<std::size_t>(k)].sigma2;
    if (iot_trace_lhs(W, data, k) < 0.0) return false;
    LmiSection sec{lmi_block(W, 0.0, data, k) * (1.0 / sigma2), lmi_mu_coef(data, k), 0.0};
    // s_bar - mu d^2 must stay nonnegative, which bounds the search interval.
    const double corner = sec.base(data.M, data.M).real();
    sec.mu_max = std::max(0.0, corner / (data.d * data.d));
    const auto [m, lmin] = best_mu(sec);
    if (lmin < 0.0) return false;
    chosen.push_back(m * sigma2);
  }
  if (mu) *mu = chosen;
  return true;
}

RandomizationResult gaussian_randomization(const std::vector<HermitianMatrix>& W_star,
                                           const RobustProblemData& data,
                                           const SolverParams& params, std::uint64_t seed) {
  const int K = data.K();
  const int M = data.M;
  if (static_cast<int>(W_star.size()) != K) {
    throw Error(ErrorCode::dimension_mismatch, "one lifted matrix per user");
  }
  std::vector<CMatrix> factor;  // U Sigma^{1/2}
  CMatrix leading(M, K);
  for (int k = 0; k < K; ++k) {
    const HermitianEig eig = hermitian_eig(W_star[static_cast<std::size_t>(k)]);
    factor.push_back(eig.vectors * eig.values.cwiseMax(0.0).cwiseSqrt().cast<cdouble>().asDiagonal());
    const EigPair top = leading_eigpair(W_star[static_cast<std::size_t>(k)]);
    leading.col(k) = std::sqrt(std::max(0.0, top.value)) * top.vector;
  }

  constexpr double kMaxScale = 1e3;
  auto feasible_at = [&](const CMatrix& w, double t) {
    return surrogate_feasible(BeamformerSet(CMatrix(std::sqrt(t) * w)), data);
  };

  bool found = false;
  RandomizationResult best;
  double best_power = std::numeric_limits<double>::infinity();
  ComplexGaussian cn(1.0);
  for (int r = 0; r < std::max(1, params.randomization_count); ++r) {
    CMatrix w(M, K);
    if (r == 0) {
      w = leading;
    } else {
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
      for (int k = 0; k < K; ++k) w.col(k) = factor[static_cast<std::size_t>(k)] * cn.vector(rng, M);
    }
    const double p = w.squaredNorm();
    if (!(p > 0.0)) continue;
    // Only scales that could beat the incumbent are worth testing.
    const double hi_cap = std::min(kMaxScale, best_power / p);
    if (hi_cap < 1.0) continue;
    if (!feasible_at(w, hi_cap)) continue;
    double lo = 1.0;
    double hi = hi_cap;
    if (feasible_at(w, lo)) {
      hi = lo;
    } else {
      while (hi - lo > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (feasible_at(w, mid)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
    }
    if (hi * p < best_power) {
      best_power = hi * p;
      best.w = BeamformerSet(CMatrix(std::sqrt(hi) * w));
      best.candidate = r;
      best.scale = hi;
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::no_feasible_candidate, "no randomized candidate is feasible");
  surrogate_feasible(best.w, data, &best.mu);
  return best;
}

CVector extract_beamformer(const HermitianMatrix& W, double tol) {
  const EigPair top = leading_eigpair(W);
  const CVector w = std::sqrt(std::max(0.0, top.value)) * top.vector;
  const double err = (W.mat() - w * w.adjoint()).norm();
  if (err > tol * std::max(1.0, W.frobenius_norm())) {
    throw Error(ErrorCode::not_rank_one, "reconstruction error " + std::to_string(err));
  }
  return w;
}

BeamformingSolution minimize_power(const CMatrix& f, const CovarianceSet& cov,
                                   const SystemConfig& cfg, const SolverParams& params) {
  const RobustProblemData data = make_robust_data(f, cov, cfg);
  const P3Layout layout = make_layout(data);
  BeamformingSolution out;
  SolverDiagnostics& diag = out.diagnostics;

  ConicSolverParams cp = params.conic;
  cp.gap_tol = params.eps_s;
  const ConicSolution sol = conic_solve(assemble_p3(data, layout), cp);
  diag.sdr_status = sol.status;
  diag.conic_iterations = sol.iterations;
  fill_conic_diagnostics(sol, diag);
  diag.complexity_estimate = complexity_estimate(cfg.M, cfg.K, params.eps_s, 0);

  if (sol.status == ConicStatus::infeasible) {
    out.status = SolutionStatus::infeasible;
    return out;
  }
  if (!usable(sol)) {
    out.status = SolutionStatus::inaccurate;
    return out;
  }

  out.W = layout.lifted(sol.x);
  out.mu = layout.slacks(sol.x);

  bool rank_one = std::all_of(out.W.begin(), out.W.end(), [&](const HermitianMatrix& Wk) {
    return is_rank_one(Wk, params.rank_ratio_tol);
  });
  diag.final_rank_gap = rank_gap(out.W);
  diag.rank_gap_trace.push_back(diag.final_rank_gap);
  diag.penalized_objective.push_back(penalized_objective(out.W, params.penalty_rho));

  if (!rank_one) {
    try {
      DcResult dc = dc_refine(out.W, out.mu, data, params);
      diag.dc_iterations = dc.iterations;
      diag.conic_iterations += dc.conic_iterations;
      diag.rank_gap_trace = dc.rank_gap_trace;
      diag.penalized_objective = dc.penalized_objective;
      diag.final_rank_gap = dc.rank_gap_trace.back();
      out.W = std::move(dc.W);
      out.mu = std::move(dc.mu);
      rank_one = dc.converged;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::subproblem_infeasible) throw;
    }
    diag.complexity_estimate = complexity_estimate(cfg.M, cfg.K, params.eps_s, diag.dc_iterations);
  }

  if (rank_one) {
    try {
      CMatrix w(cfg.M, cfg.K);
      for (int k = 0; k < cfg.K; ++k) {
        w.col(k) = extract_beamformer(out.W[static_cast<std::size_t>(k)], params.rank1_extract_tol);
      }
      out.w = BeamformerSet(std::move(w));
      const double t = iot_polish_scale(outer_products(out.w), data);
      out.w.w *= std::sqrt(t);
      for (auto& Wk : out.W) Wk = Wk * t;
      for (auto& m : out.mu) m *= t;
      out.total_power = out.w.total_power();
      out.status = SolutionStatus::optimal;
      return out;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::not_rank_one) throw;
    }
  }

  diag.randomization_used = true;
  try {
    const RandomizationResult rr =
        gaussian_randomization(out.W, data, params, params.randomization_seed);
    out.w = rr.w;
    out.W = outer_products(rr.w);
    out.mu = rr.mu;
    out.total_power = out.w.total_power();
    diag.final_rank_gap = 0.0;
    out.status = SolutionStatus::optimal;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::no_feasible_candidate) throw;
    out.status = SolutionStatus::rank_recovery_failed;
  }
  return out;
}

BeamformingSolution minimize_power(const ChannelSet& chs, const SystemConfig& cfg,
                                   CovarianceSource source, const SolverParams& params) {
  const CovarianceSet cov =
      source == CovarianceSource::exact ? covariances_exact(chs, cfg) : covariances_doa(cfg);
  return minimize_power(chs.f, cov, cfg, params);
}

double complexity_estimate(int M, int K, double eps_s, int dc_iters) {
  if (M < 1 || K < 1 || !(eps_s > 0.0 && eps_s < 1.0) || dc_iters < 0) {
    throw Error(ErrorCode::invalid_config, "complexity_estimate arguments");
  }
  const double m = M;
  const double k = K;
  const double n = k * m * m;
  const double per_iter =
      k * (std::pow(m + 1.0, 3) + std::pow(m, 3) + 2.0) +
      n * k * (std::pow(m + 1.0, 2) + m * m + 2.0) + n * n;
  const double c_p3 = std::sqrt(2.0 * k * m + 3.0 * k) * n * per_iter * std::log(1.0 / eps_s);
  return (1.0 + dc_iters) * c_p3;
}

}  // namespace srbf
