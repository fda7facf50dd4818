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

#ifndef SRBF_ROBUST_HPP
#define SRBF_ROBUST_HPP

#include "srbf/channel.hpp"

#include <vector>

namespace srbf {

/// sqrt(F^{-1}_{chi2, 2M}(1 - P_out) / 2).
double sphere_radius(double p_out, int M);

struct RobustUserData {
  HermitianMatrix C;       // reflective covariance
  HermitianMatrix C_half;  // C^{1/2}
  CVector f;               // direct link, entries of the row f_k
  double gamma_s = 0.0;    // 2^{R_s} - 1
  double gamma_c = 0.0;    // 2^{N R_c} - 1
  double sigma2 = 0.0;
};

struct RobustProblemData {
  int M = 0;
  int N = 1;
  double d = 0.0;  // sphere radius
  std::vector<RobustUserData> users;

  int K() const noexcept { return static_cast<int>(users.size()); }
};

/// Builds the per-user constraint data from direct links (rows of f) and a
/// covariance set. Throws Error(invalid_config) when a target is not positive.
RobustProblemData make_robust_data(const CMatrix& f, const CovarianceSet& cov,
                                   const SystemConfig& cfg);

/// Weight of W_i inside A_k: 1/gamma_s for i == k, -1 otherwise.
double lmi_weight(const RobustProblemData& data, int k, int i);

/// T_k = [C^{1/2}, f^H] (M x (M+1)); the LMI block is T_k^H A_k T_k plus the
/// mu and noise terms.
CMatrix lmi_transform(const RobustProblemData& data, int k);

/// Affine pieces of the LMI block: block = constant + mu * mu_coef
/// + sum_i lmi_weight(k,i) * T^H W_i T.
HermitianMatrix lmi_constant(const RobustProblemData& data, int k);  // diag(0, -sigma2)
HermitianMatrix lmi_mu_coef(const RobustProblemData& data, int k);   // diag(I, -d^2)

/// [[Q + mu I, r], [r^H, s - mu d^2]] for user k.
HermitianMatrix lmi_block(const std::vector<HermitianMatrix>& W, double mu,
                          const RobustProblemData& data, int k);

/// Coefficient matrix G_{k,i} with iot_trace_lhs = sum_i <W_i, G_{k,i}> - sigma2.
HermitianMatrix iot_coef(const RobustProblemData& data, int k, int i);

/// tr((N W_k / gamma_c - sum_{i != k} W_i) C_k) - sum_{i != k} f_k W_i f_k^H - sigma2.
double iot_trace_lhs(const std::vector<HermitianMatrix>& W, const RobustProblemData& data, int k);

/// Minimum eigenvalue test on block / scale with tolerance
/// 1e-9 * max(1, ||block / scale||_2). Pass sigma_k^2 as `scale` to test in
/// noise-normalized units.
bool lmi_certified(const HermitianMatrix& block, double scale = 1.0);

}  // namespace srbf

#endif  // SRBF_ROBUST_HPP
