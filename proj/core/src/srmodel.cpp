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

#include "srbf/srmodel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

namespace srbf {

namespace {

constexpr long kChunk = 4096;

void check_dims(const ChannelSet& chs, const BeamformerSet& W, int k) {
  chs.check_consistent();
  if (W.antennas() != chs.antennas() || W.users() != chs.users()) {
    throw Error(ErrorCode::dimension_mismatch, "beamformers must be M x K");
  }
  if (k < 0 || k >= chs.users()) throw Error(ErrorCode::dimension_mismatch, "user index");
}

// Counts outage events over chunks [first, last) of the sample budget.
// `eval` receives the chunk stream and returns true on an outage event.
long count_chunks(long n_samples, std::uint64_t seed, long first, long last,
                  const std::function<bool(Rng&, ComplexGaussian&)>& eval) {
  long hits = 0;
  for (long chunk = first; chunk < last; ++chunk) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(chunk)}));
    ComplexGaussian cn(1.0);
    const long begin = chunk * kChunk;
    const long end = std::min(n_samples, begin + kChunk);
    for (long i = begin; i < end; ++i) hits += eval(rng, cn) ? 1 : 0;
  }
  return hits;
}

OutageEstimate run_chunked(long n_samples, std::uint64_t seed, int workers,
                           const std::function<bool(Rng&, ComplexGaussian&)>& eval) {
  if (n_samples < 1) throw Error(ErrorCode::invalid_config, "n_samples must be >= 1");
  const long chunks = (n_samples + kChunk - 1) / kChunk;
  const int threads = static_cast<int>(std::clamp<long>(workers, 1, chunks));
  long hits = 0;
  if (threads == 1) {
    hits = count_chunks(n_samples, seed, 0, chunks, eval);
  } else {
    std::vector<long> partial(static_cast<std::size_t>(threads), 0);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        const long first = chunks * t / threads;
        const long last = chunks * (t + 1) / threads;
        partial[static_cast<std::size_t>(t)] = count_chunks(n_samples, seed, first, last, eval);
      });
    }
    for (auto& th : pool) th.join();
    for (long p : partial) hits += p;
  }
  OutageEstimate est;
  est.samples = n_samples;
  est.probability = static_cast<double>(hits) / static_cast<double>(n_samples);
  est.stderr_ = std::sqrt(est.probability * (1.0 - est.probability) / static_cast<double>(n_samples));
  return est;
}

// Aggregates that enter both the IoT SINR and the sum rate for user k.
struct IotTerms {
  std::vector<int> devices;   // decoding order
  std::vector<double> own;    // |alpha g h w_k|^2 per device
  double interference = 0.0;  // other-stream direct plus reflective terms
};

IotTerms iot_terms(const ChannelSet& chs, const SystemConfig& cfg, const BeamformerSet& W, int k) {
  check_dims(chs, W, k);
  IotTerms t;
  t.devices = chs.devices_of(k);
  for (int l : t.devices) {
    const cdouble a = cfg.alpha * chs.g(l, k) * (chs.h.row(l) * W.w.col(k))(0);
    t.own.push_back(std::norm(a));
  }
  for (int i = 0; i < chs.users(); ++i) {
    if (i == k) continue;
    t.interference += std::norm((chs.f.row(k) * W.w.col(i))(0));
    for (int l = 0; l < chs.devices(); ++l) {
      t.interference += std::norm(cfg.alpha * chs.g(l, k) * (chs.h.row(l) * W.w.col(i))(0));
    }
  }
  return t;
}

double noise(const SystemConfig& cfg, int k) { return cfg.noise_power_k[static_cast<std::size_t>(k)]; }

}  // namespace

IoTSymbolDraw IoTSymbolDraw::sample(int devices, Rng& rng) {
  ComplexGaussian cn(1.0);
  return {cn.vector(rng, devices)};
}

double cellular_sinr(const ChannelSet& chs, const SystemConfig& cfg, const BeamformerSet& W,
                     const IoTSymbolDraw& draw, int k) {
  check_dims(chs, W, k);
  if (draw.c.size() != chs.devices()) throw Error(ErrorCode::dimension_mismatch, "symbol draw");
  Eigen::RowVectorXcd eff = chs.f.row(k);
  for (int l = 0; l < chs.devices(); ++l) eff += cfg.alpha * chs.g(l, k) * draw.c(l) * chs.h.row(l);
  const Eigen::RowVectorXcd y = eff * W.w;
  double interference = 0.0;
  for (int i = 0; i < chs.users(); ++i) {
    if (i != k) interference += std::norm(y(i));
  }
  return std::norm(y(k)) / (interference + noise(cfg, k));
}

double cellular_rate(const ChannelSet& chs, const SystemConfig& cfg, const BeamformerSet& W,
                     const IoTSymbolDraw& draw, int k) {
  return std::log2(1.0 + cellular_sinr(chs, cfg, W, draw, k));
}

OutageEstimate outage_probability_mc(const ChannelSet& chs, const SystemConfig& cfg,
                                     const BeamformerSet& W, int k, double rate_target,
                                     long n_samples, std::uint64_t seed, int workers) {
  check_dims(chs, W, k);
  // y = f_k W + sum_l c_l (alpha g_{l,k} h_l W); only devices with g != 0 matter.
  const std::vector<int> devs = chs.devices_of(k);
  const Eigen::RowVectorXcd base = chs.f.row(k) * W.w;
  CMatrix proj(static_cast<Eigen::Index>(devs.size()), W.users());
  for (std::size_t j = 0; j < devs.size(); ++j) {
    const int l = devs[j];
    proj.row(static_cast<Eigen::Index>(j)) = cfg.alpha * chs.g(l, k) * (chs.h.row(l) * W.w);
  }
  const double threshold = std::exp2(rate_target) - 1.0;
  const double sigma2 = noise(cfg, k);
  const int K = W.users();
  const auto n_dev = static_cast<Eigen::Index>(devs.size());

  return run_chunked(n_samples, seed, workers, [&](Rng& rng, ComplexGaussian& cn) {
    Eigen::RowVectorXcd y = base;
    for (Eigen::Index j = 0; j < n_dev; ++j) y += cn(rng) * proj.row(j);
    double interference = 0.0;
    for (int i = 0; i < K; ++i) {
      if (i != k) interference += std::norm(y(i));
    }
    return std::norm(y(k)) <= threshold * (interference + sigma2);
  });
}

OutageEstimate outage_probability_mc_covariance(const CVector& f_k, const HermitianMatrix& C_k,
                                                double sigma2, const BeamformerSet& W, int k,
                                                double rate_target, long n_samples,
                                                std::uint64_t seed, int workers) {
  if (f_k.size() != W.antennas() || C_k.dim() != W.antennas()) {
    throw Error(ErrorCode::dimension_mismatch, "covariance outage inputs");
  }
  // Delta f = e S with e ~ CN(0, I) and S = C^{1/2}, so E[Delta f^H Delta f] = C.
  const CMatrix S = hermitian_sqrt(C_k).mat();
  const Eigen::RowVectorXcd base = f_k.transpose() * W.w;
  const CMatrix proj = S * W.w;
  const double threshold = std::exp2(rate_target) - 1.0;
  const int K = W.users();
  const Eigen::Index M = W.antennas();

  return run_chunked(n_samples, seed, workers, [&](Rng& rng, ComplexGaussian& cn) {
    Eigen::RowVectorXcd y = base;
    for (Eigen::Index m = 0; m < M; ++m) y += cn(rng) * proj.row(m);
    double interference = 0.0;
    for (int i = 0; i < K; ++i) {
      if (i != k) interference += std::norm(y(i));
    }
    return std::norm(y(k)) <= threshold * (interference + sigma2);
  });
}

double iot_device_sinr(const ChannelSet& chs, const SystemConfig& cfg, const BeamformerSet& W,
                       int k, int m) {
  const IotTerms t = iot_terms(chs, cfg, W, k);
  const auto it = std::find(t.devices.begin(), t.devices.end(), m);
  if (it == t.devices.end()) {
    throw Error(ErrorCode::dimension_mismatch, "device is not associated with user");
  }
  const auto pos = static_cast<std::size_t>(it - t.devices.begin());
  double later = 0.0;
  for (std::size_t j = pos + 1; j < t.own.size(); ++j) later += t.own[j];
  const double N = cfg.N;
  return N * t.own[pos] / (t.interference + N * later + noise(cfg, k));
}

std::vector<double> iot_device_rates(const ChannelSet& chs, const SystemConfig& cfg,
                                     const BeamformerSet& W, int k) {
  const IotTerms t = iot_terms(chs, cfg, W, k);
  const double N = cfg.N;
  std::vector<double> rates(t.own.size());
  double later = 0.0;
  for (std::size_t j = t.own.size(); j-- > 0;) {
    const double sinr = N * t.own[j] / (t.interference + N * later + noise(cfg, k));
    rates[j] = std::log2(1.0 + sinr) / N;
    later += t.own[j];
  }
  return rates;
}

double iot_sum_rate(const ChannelSet& chs, const SystemConfig& cfg, const BeamformerSet& W, int k) {
  const IotTerms t = iot_terms(chs, cfg, W, k);
  double own = 0.0;
  for (double a : t.own) own += a;
  const double N = cfg.N;
  return std::log2(1.0 + N * own / (t.interference + noise(cfg, k))) / N;
}

bool FeasibilityReport::all_ok() const {
  return std::all_of(outage_ok.begin(), outage_ok.end(), [](bool b) { return b; }) &&
         std::all_of(iot_ok.begin(), iot_ok.end(), [](bool b) { return b; });
}

double FeasibilityReport::max_outage() const {
  double worst = 0.0;
  for (const auto& o : outage) worst = std::max(worst, o.probability);
  return worst;
}

double FeasibilityReport::min_iot_margin() const {
  double worst = std::numeric_limits<double>::infinity();
  for (double m : iot_margin) worst = std::min(worst, m);
  return worst;
}

FeasibilityReport check_feasibility(const ChannelSet& chs, const SystemConfig& cfg,
                                    const BeamformerSet& W, long n_mc, std::uint64_t seed,
                                    int workers) {
  FeasibilityReport rep;
  for (int k = 0; k < chs.users(); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const OutageEstimate est =
        outage_probability_mc(chs, cfg, W, k, cfg.rate_target_cellular_k[idx], n_mc,
                              derive_seed(seed, {static_cast<std::uint64_t>(k)}), workers);
    rep.outage.push_back(est);
    rep.outage_ok.push_back(est.probability <= cfg.outage_target + 3.0 * est.stderr_);
    const double rate = iot_sum_rate(chs, cfg, W, k);
    rep.iot_rate.push_back(rate);
    rep.iot_margin.push_back(rate - cfg.rate_target_iot_k[idx]);
    rep.iot_ok.push_back(rep.iot_margin.back() >= -1e-9);
  }
  return rep;
}

}  // namespace srbf
