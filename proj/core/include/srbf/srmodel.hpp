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

#ifndef SRBF_SRMODEL_HPP
#define SRBF_SRMODEL_HPP

#include "srbf/channel.hpp"

#include <cstdint>
#include <vector>

namespace srbf {

/// Beamformers stored as the columns of an M x K matrix.
struct BeamformerSet {
  CMatrix w;

  BeamformerSet() = default;
  explicit BeamformerSet(CMatrix columns) : w(std::move(columns)) {}
  static BeamformerSet zero(int M, int K) { return BeamformerSet(CMatrix::Zero(M, K)); }

  int antennas() const noexcept { return static_cast<int>(w.rows()); }
  int users() const noexcept { return static_cast<int>(w.cols()); }
  double total_power() const { return w.squaredNorm(); }
};

/// One IoT symbol per device, i.i.d. CN(0, 1).
struct IoTSymbolDraw {
  CVector c;

  static IoTSymbolDraw sample(int devices, Rng& rng);
};

/// Instantaneous SINR of stream k given the device symbols.
double cellular_sinr(const ChannelSet& chs, const SystemConfig& cfg, const BeamformerSet& W,
                     const IoTSymbolDraw& draw, int k);
double cellular_rate(const ChannelSet& chs, const SystemConfig& cfg, const BeamformerSet& W,
                     const IoTSymbolDraw& draw, int k);

struct OutageEstimate {
  double probability = 0.0;
  double stderr_ = 0.0;  // sqrt(p (1 - p) / n)
  long samples = 0;
};

/// Fraction of draws with rate <= rate_target. Samples are split into fixed
/// chunks, each with its own substream derived from (seed, chunk), so the
/// result does not depend on `workers`.
OutageEstimate outage_probability_mc(const ChannelSet& chs, const SystemConfig& cfg,
                                     const BeamformerSet& W, int k, double rate_target,
                                     long n_samples, std::uint64_t seed, int workers = 1);

/// Same estimate with the reflective perturbation drawn directly as
/// CN(0, C_k) instead of through the device symbols.
OutageEstimate outage_probability_mc_covariance(const CVector& f_k, const HermitianMatrix& C_k,
                                                double sigma2, const BeamformerSet& W, int k,
                                                double rate_target, long n_samples,
                                                std::uint64_t seed, int workers = 1);

/// MRC/SIC SINR of device m (a global device index associated with k).
/// Devices are decoded in ascending index order within user k's set.
double iot_device_sinr(const ChannelSet& chs, const SystemConfig& cfg, const BeamformerSet& W,
                       int k, int m);

/// Per-device rates (1/N) log2(1 + SINR) in decoding order.
std::vector<double> iot_device_rates(const ChannelSet& chs, const SystemConfig& cfg,
                                     const BeamformerSet& W, int k);

double iot_sum_rate(const ChannelSet& chs, const SystemConfig& cfg, const BeamformerSet& W, int k);

struct FeasibilityReport {
  std::vector<bool> outage_ok;
  std::vector<bool> iot_ok;
  std::vector<OutageEstimate> outage;
  std::vector<double> iot_rate;
  std::vector<double> iot_margin;  // iot_rate - target, bps/Hz

  bool all_ok() const;
  double max_outage() const;
  double min_iot_margin() const;
};

/// Checks both constraints of the power-minimization problem for W:
/// iot_ok is exact (margin >= -1e-9), outage_ok is p_hat <= P_out + 3 stderr.
FeasibilityReport check_feasibility(const ChannelSet& chs, const SystemConfig& cfg,
                                    const BeamformerSet& W, long n_mc, std::uint64_t seed,
                                    int workers = 1);

}  // namespace srbf

#endif  // SRBF_SRMODEL_HPP
