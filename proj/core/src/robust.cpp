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

#include "srbf/robust.hpp"

#include <algorithm>
#include <cmath>

namespace srbf {

namespace {

void check_W(const std::vector<HermitianMatrix>& W, const RobustProblemData& data, int k) {
  if (static_cast<int>(W.size()) != data.K()) {
    throw Error(ErrorCode::dimension_mismatch, "need one lifted matrix per user");
  }
  for (const auto& Wi : W) {
    if (Wi.dim() != data.M) throw Error(ErrorCode::dimension_mismatch, "lifted matrix dimension");
  }
  if (k < 0 || k >= data.K()) throw Error(ErrorCode::dimension_mismatch, "user index");
}

}  // namespace

double sphere_radius(double p_out, int M) {
  if (!(p_out > 0.0 && p_out < 1.0)) {
    throw Error(ErrorCode::invalid_probability, "outage target must lie in (0, 1)");
  }
  return std::sqrt(0.5 * chi_square_inv_cdf(1.0 - p_out, 2 * M));
}

RobustProblemData make_robust_data(const CMatrix& f, const CovarianceSet& cov,
                                   const SystemConfig& cfg) {
  cfg.validate();
  if (f.rows() != cfg.K || f.cols() != cfg.M || static_cast<int>(cov.C.size()) != cfg.K) {
    throw Error(ErrorCode::dimension_mismatch, "direct links or covariances do not match config");
  }
  RobustProblemData data;
  data.M = cfg.M;
  data.N = cfg.N;
  data.d = sphere_radius(cfg.outage_target, cfg.M);
  for (int k = 0; k < cfg.K; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    RobustUserData u;
    u.C = cov.C[idx];
    if (u.C.dim() != cfg.M) throw Error(ErrorCode::dimension_mismatch, "covariance dimension");
    u.C_half = hermitian_sqrt(u.C);
    u.f = f.row(k).transpose();
    u.gamma_s = std::exp2(cfg.rate_target_cellular_k[idx]) - 1.0;
    u.gamma_c = std::exp2(cfg.N * cfg.rate_target_iot_k[idx]) - 1.0;
    u.sigma2 = cfg.noise_power_k[idx];
    data.users.push_back(std::move(u));
  }
  return data;
}

double lmi_weight(const RobustProblemData& data, int k, int i) {
  return i == k ? 1.0 / data.users[static_cast<std::size_t>(k)].gamma_s : -1.0;
}

CMatrix lmi_transform(const RobustProblemData& data, int k) {
  const RobustUserData& u = data.users[static_cast<std::size_t>(k)];
  CMatrix T(data.M, data.M + 1);
  T.leftCols(data.M) = u.C_half.mat();
  // column vector f^H has entries conj(f_m)
  T.col(data.M) = u.f.conjugate();
  return T;
}

HermitianMatrix lmi_constant(const RobustProblemData& data, int k) {
  CMatrix c = CMatrix::Zero(data.M + 1, data.M + 1);
  c(data.M, data.M) = -data.users[static_cast<std::size_t>(k)].sigma2;
  return HermitianMatrix(c);
}

HermitianMatrix lmi_mu_coef(const RobustProblemData& data, int /*k*/) {
  CMatrix c = CMatrix::Identity(data.M + 1, data.M + 1);
  c(data.M, data.M) = -data.d * data.d;
  return HermitianMatrix(c);
}

HermitianMatrix lmi_block(const std::vector<HermitianMatrix>& W, double mu,
                          const RobustProblemData& data, int k) {
  check_W(W, data, k);
  CMatrix A = CMatrix::Zero(data.M, data.M);
  for (int i = 0; i < data.K(); ++i) A += lmi_weight(data, k, i) * W[static_cast<std::size_t>(i)].mat();
  const CMatrix T = lmi_transform(data, k);
  const CMatrix block = T.adjoint() * A * T + mu * lmi_mu_coef(data, k).mat() +
                        lmi_constant(data, k).mat();
  return HermitianMatrix(CMatrix(0.5 * (block + block.adjoint())));
}

HermitianMatrix iot_coef(const RobustProblemData& data, int k, int i) {
  const RobustUserData& u = data.users[static_cast<std::size_t>(k)];
  if (i == k) return u.C * (static_cast<double>(data.N) / u.gamma_c);
  // tr(W f^H f) = f W f^H, with (f^H f)_{mn} = conj(f_m) f_n
  const CMatrix ff = u.f.conjugate() * u.f.transpose();
  return (u.C + HermitianMatrix(ff)) * -1.0;
}

double iot_trace_lhs(const std::vector<HermitianMatrix>& W, const RobustProblemData& data, int k) {
  check_W(W, data, k);
  double lhs = -data.users[static_cast<std::size_t>(k)].sigma2;
  for (int i = 0; i < data.K(); ++i) {
    const CMatrix& Wi = W[static_cast<std::size_t>(i)].mat();
    lhs += (Wi * iot_coef(data, k, i).mat()).trace().real();
  }
  return lhs;
}

bool lmi_certified(const HermitianMatrix& block, double scale) {
  const HermitianMatrix b = block * (1.0 / scale);
  return min_eigenvalue(b) >= -1e-9 * std::max(1.0, spectral_norm(b));
}

}  // namespace srbf
