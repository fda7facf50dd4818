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

#ifndef SRBF_CHANNEL_HPP
#define SRBF_CHANNEL_HPP

#include "srbf/numerics.hpp"
#include "srbf/random.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace srbf {

enum class ChannelModel {
  general,    // L devices, each reflecting towards every user, Rayleigh fading
  clustered,  // L_k line-of-sight devices per user around the user's DoA
};

enum class Placement { uniform_grid, seeded_random };

/// Scenario parameters. Per-user vectors have K entries. Angles in radians,
/// gains in dB, distances and wavelength in meters, powers in watts.
struct SystemConfig {
  ChannelModel model = ChannelModel::clustered;
  Placement placement = Placement::uniform_grid;

  int M = 6;                  // BS antennas
  int K = 2;                  // cellular users
  int L = 0;                  // devices, general model
  std::vector<int> L_k;       // devices per user, clustered model
  double alpha = 0.5;         // reflection coefficient
  int N = 16;                 // IoT symbol period in BS symbols
  std::vector<double> noise_power_k;
  double carrier_wavelength = 0.33;
  double antenna_gain_bs_db = 6.0;
  double antenna_gain_user_db = 6.0;
  double pathloss_exponent = 3.5;
  std::vector<double> user_distances;
  std::vector<double> doa_k;
  std::vector<double> as_k;
  double reflective_deficit_db = 20.0;
  std::vector<double> rate_target_cellular_k;
  std::vector<double> rate_target_iot_k;
  double outage_target = 0.1;

  /// Total device count for either model.
  int device_count() const;

  /// Throws Error(invalid_config) listing the first violated invariant.
  void validate() const;

  /// M=6, K=2, L_k=4, alpha=0.5, N=16, -100 dBm noise, d=(200,180) m,
  /// DoA=(-pi/3, pi/3), AS=0.01, 20 dB reflective deficit, P_out=10%,
  /// R_s=3 bps/Hz, R_c=0.12 bps/Hz.
  static SystemConfig reference();
};

struct ChannelSet {
  CMatrix f;  // K x M, row k is the direct link f_k
  CMatrix h;  // L x M, row l is the BS-to-device link h_l
  CMatrix g;  // L x K, device-to-user scalars g_{l,k}
  std::optional<std::vector<int>> association;  // device -> owning user

  int users() const noexcept { return static_cast<int>(f.rows()); }
  int antennas() const noexcept { return static_cast<int>(f.cols()); }
  int devices() const noexcept { return static_cast<int>(h.rows()); }

  /// Devices whose reflective link reaches user k, in ascending index order.
  std::vector<int> devices_of(int k) const;

  void check_consistent() const;
};

enum class CovarianceProvenance { exact, doa_approx };

struct CovarianceSet {
  std::vector<HermitianMatrix> C;
  CovarianceProvenance provenance = CovarianceProvenance::exact;
  std::vector<double> clipped_mass;  // per user, eigenvalue mass removed by PSD projection
};

/// ULA response with half-wavelength spacing: entry m is exp(j m pi sin(theta)).
CVector steering_vector(double theta, int M);

double db_to_linear(double db);
double dbm_to_watts(double dbm);

/// lambda^2 G_b G_r / ((4 pi)^2 d^nu).
double path_loss(double distance, const SystemConfig& cfg);

/// Rayleigh draw for the general model: f_k ~ CN(0, PL_k I), h_l ~ CN(0, I),
/// g_{l,k} ~ CN(0, PL_k 10^(-deficit/10)).
ChannelSet sample_general_channels(const SystemConfig& cfg, std::uint64_t seed);

/// Line-of-sight clusters. `seed` is only consulted for seeded_random placement.
ChannelSet build_clustered_channels(const SystemConfig& cfg, Placement placement,
                                    std::uint64_t seed = 0);

/// Dispatches on cfg.model (and cfg.placement for the clustered model).
ChannelSet make_channels(const SystemConfig& cfg, std::uint64_t seed);

/// Device DoAs assigned to user k by build_clustered_channels.
std::vector<double> cluster_doas(const SystemConfig& cfg, int k, Placement placement, Rng& rng);

/// |psi_k|^2 = PL_k 10^(-deficit/10).
double reflective_gain(const SystemConfig& cfg, int k);

/// C_k = sum_l |alpha g_{l,k}|^2 h_l^H h_l.
HermitianMatrix covariance_exact(const ChannelSet& chs, const SystemConfig& cfg, int k);

/// Sinc-based Toeplitz approximation from (theta_k, Delta_k, |psi_k|^2),
/// projected onto the PSD cone. The removed mass is reported through
/// `clipped_mass` when non-null.
HermitianMatrix covariance_doa(double theta_k, double delta_k, double psi2_k, double alpha, int L_k,
                               int M, double* clipped_mass = nullptr);

CovarianceSet covariances_exact(const ChannelSet& chs, const SystemConfig& cfg);
CovarianceSet covariances_doa(const SystemConfig& cfg);

}  // namespace srbf

#endif  // SRBF_CHANNEL_HPP
