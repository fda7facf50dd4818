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

#include <benchmark/benchmark.h>

namespace {

srbf::SystemConfig scenario(int M) {
  srbf::SystemConfig cfg = srbf::SystemConfig::reference();
  cfg.M = M;
  return cfg;
}

void BM_ChiSquareQuantile(benchmark::State& state) {
  const int dof = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(srbf::chi_square_inv_cdf(0.9, dof));
}
BENCHMARK(BM_ChiSquareQuantile)->Arg(2)->Arg(12)->Arg(64);

void BM_HermitianSqrt(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  srbf::Rng rng(1);
  srbf::ComplexGaussian cn;
  srbf::CMatrix A(n, n);
  for (int i = 0; i < n; ++i) A.col(i) = cn.vector(rng, n);
  const srbf::HermitianMatrix C(srbf::CMatrix(A * A.adjoint()));
  for (auto _ : state) benchmark::DoNotOptimize(srbf::hermitian_sqrt(C));
}
BENCHMARK(BM_HermitianSqrt)->Arg(6)->Arg(16)->Arg(32);

void BM_RelaxedProgram(benchmark::State& state) {
  const srbf::SystemConfig cfg = scenario(static_cast<int>(state.range(0)));
  const srbf::ChannelSet chs = srbf::make_channels(cfg, 0);
  const auto data = srbf::make_robust_data(chs.f, srbf::covariances_exact(chs, cfg), cfg);
  const auto layout = srbf::make_layout(data);
  const srbf::ConicProgram prog = srbf::assemble_p3(data, layout);
  for (auto _ : state) benchmark::DoNotOptimize(srbf::conic_solve(prog));
}
BENCHMARK(BM_RelaxedProgram)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_MinimizePower(benchmark::State& state) {
  const srbf::SystemConfig cfg = scenario(6);
  const srbf::ChannelSet chs = srbf::make_channels(cfg, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(srbf::minimize_power(chs, cfg, srbf::CovarianceSource::exact));
  }
}
BENCHMARK(BM_MinimizePower)->Unit(benchmark::kMillisecond);

void BM_OutageMonteCarlo(benchmark::State& state) {
  const srbf::SystemConfig cfg = scenario(6);
  const srbf::ChannelSet chs = srbf::make_channels(cfg, 0);
  const auto sol = srbf::minimize_power(chs, cfg, srbf::CovarianceSource::exact);
  const long n = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(srbf::outage_probability_mc(
        chs, cfg, sol.w, 0, cfg.rate_target_cellular_k[0], n, 7));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_OutageMonteCarlo)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
