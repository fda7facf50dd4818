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

#ifndef SRBF_EXPERIMENTS_HPP
#define SRBF_EXPERIMENTS_HPP

#include "srbf/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace srbf {

enum class Approach { csi, doa, both };

enum class SweepParam {
  rate_target_cellular,
  rate_target_iot,
  outage_target,
  angular_spread,
  alpha,
  devices_per_user,
  power_w,
};

const char* to_string(Approach a) noexcept;
const char* to_string(SweepParam p) noexcept;
Approach parse_approach(const std::string& s);
SweepParam parse_sweep_param(const std::string& s);

struct ExperimentSpec {
  SystemConfig scenario = SystemConfig::reference();
  SweepParam sweep_param = SweepParam::rate_target_cellular;
  std::vector<double> sweep_values;
  int trials = 50;
  std::uint64_t seed = 0;
  Approach approach = Approach::both;
  bool baseline = false;  // add MRT rows to power_w sweeps
  long mc_samples = 100000;
  int workers = 1;
  SolverParams solver;

  /// Throws Error(invalid_config).
  void validate() const;
};

/// Key/value text: the scenario keys plus sweep_param, sweep_values, trials,
/// seed, approach, baseline, mc_samples, workers, penalty_rho, eta,
/// power_grid (alias of sweep_values with sweep_param = power_w).
ExperimentSpec parse_experiment(const std::string& text);
ExperimentSpec load_experiment(const std::string& path);

/// Returns cfg with the swept quantity set for every user.
SystemConfig apply_sweep_value(const SystemConfig& cfg, SweepParam p, double value);

struct FailureCounts {
  int infeasible = 0;
  int rank = 0;
  int inaccurate = 0;
  int validation = 0;  // solver reported optimal but check_feasibility failed
  int error = 0;

  int total() const noexcept { return infeasible + rank + inaccurate + validation + error; }
  std::string format() const;  // infeasible=0|rank=0|inaccurate=0|validation=0|error=0
  static FailureCounts parse(const std::string& s);
  bool operator==(const FailureCounts&) const = default;
};

struct ResultRow {
  std::string sweep_param;
  double sweep_value = 0.0;
  std::string approach;    // csi, doa or mrt
  double mean_power_w = 0.0;  // over feasible trials; NaN if none
  double feasibility = 0.0;
  double feasibility_stderr = 0.0;  // binomial, not serialized
  double mc_outage = 0.0;           // mean over feasible trials of the worst user
  double iot_margin_bpshz = 0.0;    // mean over feasible trials of the worst user
  double dc_iters = 0.0;
  FailureCounts failures;
};

struct MrtResult {
  BeamformerSet w;
  FeasibilityReport report;
  bool feasible = false;
};

/// w_k = sqrt(P/K) f_k^H / ||f_k||, validated with check_feasibility.
MrtResult mrt_baseline(const ChannelSet& chs, const SystemConfig& cfg, double power_budget,
                       long n_mc, std::uint64_t seed);

/// Per grid power P and trial: the proposed scheme is feasible iff it returns
/// a validated solution with total power <= P; MRT iff its validation passes
/// at budget P.
std::vector<ResultRow> feasibility_curve(const ExperimentSpec& spec,
                                         const std::vector<double>& power_grid);

/// Rows in grid order, csi before doa (and mrt last for power_w sweeps).
std::vector<ResultRow> sweep_run(const ExperimentSpec& spec);

std::string format_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(const std::string& text);

/// Throws Error(io_error).
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

}  // namespace srbf

#endif  // SRBF_EXPERIMENTS_HPP
