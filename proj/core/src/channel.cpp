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

#include "srbf/channel.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace srbf {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::invalid_config, what);
}

template <typename T>
void require_size(const std::vector<T>& v, int K, const char* name) {
  require(static_cast<int>(v.size()) == K,
          std::string(name) + " must have K=" + std::to_string(K) + " entries");
}

}  // namespace

int SystemConfig::device_count() const {
  if (model == ChannelModel::general) return L;
  return std::accumulate(L_k.begin(), L_k.end(), 0);
}

void SystemConfig::validate() const {
  require(M >= 1, "M must be >= 1");
  require(K >= 1, "K must be >= 1");
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  require(N >= 1, "N must be >= 1");
  require(carrier_wavelength > 0.0, "carrier_wavelength must be positive");
  require(pathloss_exponent > 0.0, "pathloss_exponent must be positive");
  require(outage_target > 0.0 && outage_target < 1.0, "outage_target must lie in (0, 1)");
  require(std::isfinite(reflective_deficit_db), "reflective_deficit_db must be finite");
  require_size(noise_power_k, K, "noise_power_k");
  require_size(user_distances, K, "user_distances");
  require_size(rate_target_cellular_k, K, "rate_target_cellular_k");
  require_size(rate_target_iot_k, K, "rate_target_iot_k");
  for (int k = 0; k < K; ++k) {
    require(noise_power_k[k] > 0.0, "noise_power_k must be positive");
    require(user_distances[k] > 0.0, "user_distances must be positive");
    require(rate_target_cellular_k[k] > 0.0, "rate_target_cellular_k must be positive");
    require(rate_target_iot_k[k] > 0.0, "rate_target_iot_k must be positive");
  }
  if (model == ChannelModel::general) {
    require(L >= 0, "L must be >= 0");
  } else {
    require_size(L_k, K, "L_k");
    require_size(doa_k, K, "doa_k");
    require_size(as_k, K, "as_k");
    for (int k = 0; k < K; ++k) {
      require(L_k[k] >= 0, "L_k must be >= 0");
      require(std::isfinite(doa_k[k]), "doa_k must be finite");
      require(as_k[k] >= 0.0 && as_k[k] < std::numbers::pi, "as_k must lie in [0, pi)");
    }
  }
}

SystemConfig SystemConfig::reference() {
  SystemConfig cfg;
  cfg.model = ChannelModel::clustered;
  cfg.placement = Placement::uniform_grid;
  cfg.M = 6;
  cfg.K = 2;
  cfg.L_k = {4, 4};
  cfg.alpha = 0.5;
  cfg.N = 16;
  cfg.noise_power_k = {dbm_to_watts(-100.0), dbm_to_watts(-100.0)};
  cfg.carrier_wavelength = 0.33;
  cfg.antenna_gain_bs_db = 6.0;
  cfg.antenna_gain_user_db = 6.0;
  cfg.pathloss_exponent = 3.5;
  cfg.user_distances = {200.0, 180.0};
  cfg.doa_k = {-std::numbers::pi / 3.0, std::numbers::pi / 3.0};
  cfg.as_k = {0.01, 0.01};
  cfg.reflective_deficit_db = 20.0;
  cfg.rate_target_cellular_k = {3.0, 3.0};
  cfg.rate_target_iot_k = {0.12, 0.12};
  cfg.outage_target = 0.1;
  return cfg;
}

std::vector<int> ChannelSet::devices_of(int k) const {
  std::vector<int> out;
  for (int l = 0; l < devices(); ++l) {
    if (association) {
      if ((*association)[static_cast<std::size_t>(l)] == k) out.push_back(l);
    } else if (g(l, k) != cdouble(0.0, 0.0)) {
      out.push_back(l);
    }
  }
  return out;
}

void ChannelSet::check_consistent() const {
  if (h.rows() > 0 && h.cols() != f.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "h must have M columns");
  }
  if (g.rows() != h.rows() || g.cols() != f.rows()) {
    throw Error(ErrorCode::dimension_mismatch, "g must be L x K");
  }
  if (association && static_cast<int>(association->size()) != devices()) {
    throw Error(ErrorCode::dimension_mismatch, "association must cover every device");
  }
}

CVector steering_vector(double theta, int M) {
  CVector a(M);
  const double step = std::numbers::pi * std::sin(theta);
  for (int m = 0; m < M; ++m) a(m) = std::polar(1.0, m * step);
  return a;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double dbm_to_watts(double dbm) { return 1e-3 * db_to_linear(dbm); }

double path_loss(double distance, const SystemConfig& cfg) {
  if (!(distance > 0.0)) {
    throw Error(ErrorCode::nonpositive_distance, "distance must be positive");
  }
  const double four_pi = 4.0 * std::numbers::pi;
  return cfg.carrier_wavelength * cfg.carrier_wavelength * db_to_linear(cfg.antenna_gain_bs_db) *
         db_to_linear(cfg.antenna_gain_user_db) /
         (four_pi * four_pi * std::pow(distance, cfg.pathloss_exponent));
}

double reflective_gain(const SystemConfig& cfg, int k) {
  return path_loss(cfg.user_distances[static_cast<std::size_t>(k)], cfg) *
         db_to_linear(-cfg.reflective_deficit_db);
}

ChannelSet sample_general_channels(const SystemConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(derive_seed(seed, {0x6765}));
  ChannelSet chs;
  chs.f.resize(cfg.K, cfg.M);
  chs.h.resize(cfg.L, cfg.M);
  chs.g.resize(cfg.L, cfg.K);

  ComplexGaussian unit(1.0);
  for (int k = 0; k < cfg.K; ++k) {
    const double pl = path_loss(cfg.user_distances[static_cast<std::size_t>(k)], cfg);
    chs.f.row(k) = std::sqrt(pl) * unit.vector(rng, cfg.M).transpose();
  }
  for (int l = 0; l < cfg.L; ++l) chs.h.row(l) = unit.vector(rng, cfg.M).transpose();
  for (int l = 0; l < cfg.L; ++l) {
    for (int k = 0; k < cfg.K; ++k) chs.g(l, k) = std::sqrt(reflective_gain(cfg, k)) * unit(rng);
  }
  return chs;
}

std::vector<double> cluster_doas(const SystemConfig& cfg, int k, Placement placement, Rng& rng) {
  const auto idx = static_cast<std::size_t>(k);
  const int count = cfg.L_k[idx];
  const double theta = cfg.doa_k[idx];
  const double spread = cfg.as_k[idx];
  std::vector<double> doas(static_cast<std::size_t>(count));
  if (placement == Placement::uniform_grid) {
    // midpoints of `count` equal cells spanning [theta - spread/2, theta + spread/2]
    for (int l = 0; l < count; ++l) {
      doas[static_cast<std::size_t>(l)] = theta - 0.5 * spread + spread * (l + 0.5) / count;
    }
  } else {
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (auto& d : doas) d = theta + spread * u(rng);
  }
  return doas;
}

ChannelSet build_clustered_channels(const SystemConfig& cfg, Placement placement,
                                    std::uint64_t seed) {
  if (cfg.model != ChannelModel::clustered) {
    throw Error(ErrorCode::invalid_config, "clustered channels need per-user L_k");
  }
  cfg.validate();
  Rng rng(derive_seed(seed, {0x636c}));

  const int total = cfg.device_count();
  ChannelSet chs;
  chs.f.resize(cfg.K, cfg.M);
  chs.h.resize(total, cfg.M);
  chs.g = CMatrix::Zero(total, cfg.K);
  std::vector<int> owner;
  owner.reserve(static_cast<std::size_t>(total));

  // beta_{l,k} carries the BS-side path loss; the reflective deficit sits in
  // g_{l,k}, so that |g beta|^2 = |psi_k|^2 with psi_k real positive.
  const double deficit = db_to_linear(-cfg.reflective_deficit_db);
  int row = 0;
  for (int k = 0; k < cfg.K; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const double beta = std::sqrt(path_loss(cfg.user_distances[idx], cfg));
    chs.f.row(k) = beta * steering_vector(cfg.doa_k[idx], cfg.M).transpose();
    for (double theta : cluster_doas(cfg, k, placement, rng)) {
      chs.h.row(row) = beta * steering_vector(theta, cfg.M).transpose();
      chs.g(row, k) = std::sqrt(deficit);
      owner.push_back(k);
      ++row;
    }
  }
  chs.association = std::move(owner);
  return chs;
}

ChannelSet make_channels(const SystemConfig& cfg, std::uint64_t seed) {
  if (cfg.model == ChannelModel::general) return sample_general_channels(cfg, seed);
  return build_clustered_channels(cfg, cfg.placement, seed);
}

HermitianMatrix covariance_exact(const ChannelSet& chs, const SystemConfig& cfg, int k) {
  chs.check_consistent();
  if (k < 0 || k >= chs.users()) throw Error(ErrorCode::dimension_mismatch, "user index");
  const int M = chs.antennas();
  CMatrix c = CMatrix::Zero(M, M);
  for (int l : chs.devices_of(k)) {
    const double weight = std::norm(cfg.alpha * chs.g(l, k));
    const CVector hl = chs.h.row(l).transpose();
    // h^H h for a row vector h: entry (m, n) = conj(h_m) h_n
    c.noalias() += weight * (hl.conjugate() * hl.transpose());
  }
  return HermitianMatrix(c);
}

HermitianMatrix covariance_doa(double theta_k, double delta_k, double psi2_k, double alpha, int L_k,
                               int M, double* clipped_mass) {
  const double scale = alpha * alpha * psi2_k * L_k;
  const double chi = std::numbers::pi;
  CMatrix c(M, M);
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < M; ++n) {
      const double diff = m - n;
      const double envelope = sinc(0.5 * delta_k * diff * chi * std::cos(theta_k));
      c(m, n) = scale * envelope * std::polar(1.0, -diff * chi * std::sin(theta_k));
    }
  }
  return project_psd(HermitianMatrix(c), clipped_mass);
}

CovarianceSet covariances_exact(const ChannelSet& chs, const SystemConfig& cfg) {
  CovarianceSet out;
  out.provenance = CovarianceProvenance::exact;
  for (int k = 0; k < chs.users(); ++k) {
    out.C.push_back(covariance_exact(chs, cfg, k));
    out.clipped_mass.push_back(0.0);
  }
  return out;
}

CovarianceSet covariances_doa(const SystemConfig& cfg) {
  if (cfg.model != ChannelModel::clustered) {
    throw Error(ErrorCode::invalid_config, "DoA covariances need the clustered model");
  }
  CovarianceSet out;
  out.provenance = CovarianceProvenance::doa_approx;
  for (int k = 0; k < cfg.K; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    double clipped = 0.0;
    out.C.push_back(covariance_doa(cfg.doa_k[idx], cfg.as_k[idx], reflective_gain(cfg, k),
                                   cfg.alpha, cfg.L_k[idx], cfg.M, &clipped));
    out.clipped_mass.push_back(clipped);
  }
  return out;
}

}  // namespace srbf
