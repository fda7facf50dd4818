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

#include "srbf/experiments.hpp"

#include "srbf/scenario_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace srbf {

namespace {

constexpr const char* kCsvHeader =
    "sweep_param,sweep_value,approach,mean_power_w,feasibility,mc_outage,iot_margin_bpshz,"
    "dc_iters,failures";

// Seed paths below the experiment seed, one subtree per trial.
constexpr std::uint64_t kChannelStream = 1;
constexpr std::uint64_t kValidationStream = 2;
constexpr std::uint64_t kRandomizationStream = 3;

std::uint64_t trial_seed(std::uint64_t base, int trial, std::uint64_t stream) {
  return derive_seed(base, {static_cast<std::uint64_t>(trial), stream});
}

std::string fmt9(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

bool parse_bool(const KeyValue& kv) {
  const std::string& v = kv.value;
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::parse_error,
              "line " + std::to_string(kv.line) + ": expected on/off for '" + kv.key + "'");
}

long parse_long(const KeyValue& kv) {
  const double v = parse_real(kv.value);
  if (v != std::floor(v) || std::abs(v) > 9e15) {
    throw Error(ErrorCode::parse_error,
                "line " + std::to_string(kv.line) + ": expected an integer for '" + kv.key + "'");
  }
  return static_cast<long>(v);
}

// Runs body(t) for t in [0, n) on up to `workers` threads. Each call writes
// only its own output slot, so the result does not depend on scheduling.
template <typename Body>
void parallel_for(int n, int workers, Body body) {
  const int w = std::max(1, std::min(workers, n));
  if (w == 1) {
    for (int t = 0; t < n; ++t) body(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int i = 0; i < w; ++i) {
    pool.emplace_back([&] {
      for (int t = next++; t < n; t = next++) body(t);
    });
  }
  for (auto& th : pool) th.join();
}

enum class Outcome { feasible, infeasible, rank, inaccurate, validation, error };

struct TrialResult {
  Outcome outcome = Outcome::error;
  double power = 0.0;
  double outage = 0.0;
  double margin = 0.0;
  int dc_iters = 0;
};

TrialResult run_trial(const ExperimentSpec& spec, const SystemConfig& cfg, int trial,
                      CovarianceSource source) {
  TrialResult r;
  try {
    const ChannelSet chs = make_channels(cfg, trial_seed(spec.seed, trial, kChannelStream));
    SolverParams params = spec.solver;
    params.randomization_seed = trial_seed(spec.seed, trial, kRandomizationStream);
    const BeamformingSolution sol = minimize_power(chs, cfg, source, params);
    r.dc_iters = sol.diagnostics.dc_iterations;
    switch (sol.status) {
      case SolutionStatus::optimal: break;
      case SolutionStatus::infeasible: r.outcome = Outcome::infeasible; return r;
      case SolutionStatus::rank_recovery_failed: r.outcome = Outcome::rank; return r;
      case SolutionStatus::inaccurate: r.outcome = Outcome::inaccurate; return r;
    }
    const FeasibilityReport rep = check_feasibility(
        chs, cfg, sol.w, spec.mc_samples, trial_seed(spec.seed, trial, kValidationStream));
    r.power = sol.total_power;
    r.outage = rep.max_outage();
    r.margin = rep.min_iot_margin();
    r.outcome = rep.all_ok() ? Outcome::feasible : Outcome::validation;
  } catch (const Error&) {
    r.outcome = Outcome::error;
  }
  return r;
}

void count_failure(FailureCounts& f, Outcome o) {
  switch (o) {
    case Outcome::feasible: break;
    case Outcome::infeasible: ++f.infeasible; break;
    case Outcome::rank: ++f.rank; break;
    case Outcome::inaccurate: ++f.inaccurate; break;
    case Outcome::validation: ++f.validation; break;
    case Outcome::error: ++f.error; break;
  }
}

// Aggregates trials in index order; `accept` decides feasibility per trial.
template <typename Accept>
ResultRow aggregate(const std::string& param, double value, const std::string& approach,
                    const std::vector<TrialResult>& trials, Accept accept) {
  ResultRow row;
  row.sweep_param = param;
  row.sweep_value = value;
  row.approach = approach;
  int n_ok = 0;
  double power = 0.0;
  double outage = 0.0;
  double margin = 0.0;
  double dc = 0.0;
  for (const auto& t : trials) {
    count_failure(row.failures, t.outcome);
    if (!accept(t)) continue;
    ++n_ok;
    power += t.power;
    outage += t.outage;
    margin += t.margin;
    dc += t.dc_iters;
  }
  const double n = static_cast<double>(trials.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.feasibility = n > 0 ? n_ok / n : 0.0;
  row.feasibility_stderr = n > 0 ? std::sqrt(row.feasibility * (1.0 - row.feasibility) / n) : 0.0;
  row.mean_power_w = n_ok > 0 ? power / n_ok : nan;
  row.mc_outage = n_ok > 0 ? outage / n_ok : nan;
  row.iot_margin_bpshz = n_ok > 0 ? margin / n_ok : nan;
  row.dc_iters = n_ok > 0 ? dc / n_ok : nan;
  return row;
}

std::vector<CovarianceSource> sources(Approach a) {
  switch (a) {
    case Approach::csi: return {CovarianceSource::exact};
    case Approach::doa: return {CovarianceSource::doa};
    case Approach::both: return {CovarianceSource::exact, CovarianceSource::doa};
  }
  return {};
}

const char* source_name(CovarianceSource s) { return s == CovarianceSource::exact ? "csi" : "doa"; }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_csv_real(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw Error(ErrorCode::parse_error, "trailing characters in '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::parse_error, "not a number: '" + s + "'");
  }
}

}  // namespace

const char* to_string(Approach a) noexcept {
  switch (a) {
    case Approach::csi: return "csi";
    case Approach::doa: return "doa";
    case Approach::both: return "both";
  }
  return "unknown";
}

const char* to_string(SweepParam p) noexcept {
  switch (p) {
    case SweepParam::rate_target_cellular: return "rate_target_cellular";
    case SweepParam::rate_target_iot: return "rate_target_iot";
    case SweepParam::outage_target: return "outage_target";
    case SweepParam::angular_spread: return "angular_spread";
    case SweepParam::alpha: return "alpha";
    case SweepParam::devices_per_user: return "devices_per_user";
    case SweepParam::power_w: return "power_w";
  }
  return "unknown";
}

Approach parse_approach(const std::string& s) {
  for (Approach a : {Approach::csi, Approach::doa, Approach::both}) {
    if (s == to_string(a)) return a;
  }
  throw Error(ErrorCode::invalid_config, "approach must be csi, doa or both, got '" + s + "'");
}

SweepParam parse_sweep_param(const std::string& s) {
  for (SweepParam p : {SweepParam::rate_target_cellular, SweepParam::rate_target_iot,
                       SweepParam::outage_target, SweepParam::angular_spread, SweepParam::alpha,
                       SweepParam::devices_per_user, SweepParam::power_w}) {
    if (s == to_string(p)) return p;
  }
  throw Error(ErrorCode::invalid_config, "unknown sweep parameter '" + s + "'");
}

void ExperimentSpec::validate() const {
  scenario.validate();
  if (sweep_values.empty()) throw Error(ErrorCode::invalid_config, "sweep grid is empty");
  if (trials < 1) throw Error(ErrorCode::invalid_config, "trials must be at least 1");
  if (mc_samples < 1) throw Error(ErrorCode::invalid_config, "mc_samples must be at least 1");
  if (workers < 1) throw Error(ErrorCode::invalid_config, "workers must be at least 1");
  for (double v : sweep_values) apply_sweep_value(scenario, sweep_param, v).validate();
}

ExperimentSpec parse_experiment(const std::string& text) {
  ExperimentSpec spec;
  bool has_L = false;
  bool has_Lk = false;
  bool has_grid = false;
  for (const auto& kv : parse_key_values(text)) {
    has_L = has_L || kv.key == "L";
    has_Lk = has_Lk || kv.key == "L_k";
    if (kv.key == "sweep_param") {
      spec.sweep_param = parse_sweep_param(kv.value);
    } else if (kv.key == "sweep_values" || kv.key == "power_grid") {
      if (has_grid) throw Error(ErrorCode::invalid_config, "both sweep_values and power_grid given");
      has_grid = true;
      spec.sweep_values = parse_real_list(kv.value);
      if (kv.key == "power_grid") spec.sweep_param = SweepParam::power_w;
    } else if (kv.key == "trials") {
      spec.trials = static_cast<int>(parse_long(kv));
    } else if (kv.key == "seed") {
      spec.seed = static_cast<std::uint64_t>(parse_long(kv));
    } else if (kv.key == "approach") {
      spec.approach = parse_approach(kv.value);
    } else if (kv.key == "baseline") {
      spec.baseline = parse_bool(kv);
    } else if (kv.key == "mc_samples") {
      spec.mc_samples = parse_long(kv);
    } else if (kv.key == "workers") {
      spec.workers = static_cast<int>(parse_long(kv));
    } else if (kv.key == "penalty_rho") {
      spec.solver.penalty_rho = parse_real(kv.value);
    } else if (kv.key == "eta") {
      spec.solver.eta = parse_real(kv.value);
    } else if (!apply_scenario_key(spec.scenario, kv)) {
      throw Error(ErrorCode::invalid_config,
                  "line " + std::to_string(kv.line) + ": unknown key '" + kv.key + "'");
    }
  }
  if (has_L && has_Lk) throw Error(ErrorCode::invalid_config, "both L and L_k given");
  finalize_scenario(spec.scenario);
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment(const std::string& path) {
  return parse_experiment(read_text_file(path));
}

SystemConfig apply_sweep_value(const SystemConfig& cfg, SweepParam p, double value) {
  SystemConfig out = cfg;
  const auto K = static_cast<std::size_t>(cfg.K);
  switch (p) {
    case SweepParam::rate_target_cellular: out.rate_target_cellular_k.assign(K, value); break;
    case SweepParam::rate_target_iot: out.rate_target_iot_k.assign(K, value); break;
    case SweepParam::outage_target: out.outage_target = value; break;
    case SweepParam::angular_spread: out.as_k.assign(K, value); break;
    case SweepParam::alpha: out.alpha = value; break;
    case SweepParam::devices_per_user:
      if (value != std::floor(value) || value < 1.0) {
        throw Error(ErrorCode::invalid_config, "devices_per_user must be a positive integer");
      }
      if (cfg.model == ChannelModel::general) {
        out.L = static_cast<int>(value) * cfg.K;
      } else {
        out.L_k.assign(K, static_cast<int>(value));
      }
      break;
    case SweepParam::power_w:
      if (!(value > 0.0)) throw Error(ErrorCode::invalid_config, "power grid must be positive");
      break;
  }
  return out;
}

std::string FailureCounts::format() const {
  return "infeasible=" + std::to_string(infeasible) + "|rank=" + std::to_string(rank) +
         "|inaccurate=" + std::to_string(inaccurate) + "|validation=" + std::to_string(validation) +
         "|error=" + std::to_string(error);
}

FailureCounts FailureCounts::parse(const std::string& s) {
  FailureCounts f;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, '|')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::parse_error, "bad failure field '" + item + "'");
    const std::string key = item.substr(0, eq);
    const int v = static_cast<int>(parse_csv_real(item.substr(eq + 1)));
    if (key == "infeasible") {
      f.infeasible = v;
    } else if (key == "rank") {
      f.rank = v;
    } else if (key == "inaccurate") {
      f.inaccurate = v;
    } else if (key == "validation") {
      f.validation = v;
    } else if (key == "error") {
      f.error = v;
    } else {
      throw Error(ErrorCode::parse_error, "unknown failure category '" + key + "'");
    }
  }
  return f;
}

MrtResult mrt_baseline(const ChannelSet& chs, const SystemConfig& cfg, double power_budget,
                       long n_mc, std::uint64_t seed) {
  if (!(power_budget > 0.0)) throw Error(ErrorCode::invalid_config, "power budget must be positive");
  MrtResult r;
  CMatrix w = CMatrix::Zero(cfg.M, cfg.K);
  const double per_user = std::sqrt(power_budget / cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    const CVector fk = chs.f.row(k).adjoint();  // f_k^H as a column
    const double n = fk.norm();
    if (n > 0.0) w.col(k) = per_user * fk / n;
  }
  r.w = BeamformerSet(std::move(w));
  r.report = check_feasibility(chs, cfg, r.w, n_mc, seed);
  r.feasible = r.report.all_ok();
  return r;
}

std::vector<ResultRow> feasibility_curve(const ExperimentSpec& spec,
                                         const std::vector<double>& power_grid) {
  if (power_grid.empty()) throw Error(ErrorCode::invalid_config, "power grid is empty");
  const std::string param = to_string(SweepParam::power_w);
  const int n = spec.trials;

  std::vector<ResultRow> rows;
  std::vector<std::vector<TrialResult>> proposed;
  for (CovarianceSource src : sources(spec.approach)) {
    std::vector<TrialResult> res(static_cast<std::size_t>(n));
    parallel_for(n, spec.workers,
                 [&](int t) { res[static_cast<std::size_t>(t)] = run_trial(spec, spec.scenario, t, src); });
    proposed.push_back(std::move(res));
  }

  std::vector<std::vector<TrialResult>> mrt;
  if (spec.baseline) {
    for (double P : power_grid) {
      std::vector<TrialResult> res(static_cast<std::size_t>(n));
      parallel_for(n, spec.workers, [&](int t) {
        TrialResult& r = res[static_cast<std::size_t>(t)];
        try {
          const ChannelSet chs =
              make_channels(spec.scenario, trial_seed(spec.seed, t, kChannelStream));
          const MrtResult m = mrt_baseline(chs, spec.scenario, P, spec.mc_samples,
                                           trial_seed(spec.seed, t, kValidationStream));
          r.power = P;
          r.outage = m.report.max_outage();
          r.margin = m.report.min_iot_margin();
          r.outcome = m.feasible ? Outcome::feasible : Outcome::validation;
        } catch (const Error&) {
          r.outcome = Outcome::error;
        }
      });
      mrt.push_back(std::move(res));
    }
  }

  const std::vector<CovarianceSource> srcs = sources(spec.approach);
  for (std::size_t g = 0; g < power_grid.size(); ++g) {
    const double P = power_grid[g];
    for (std::size_t a = 0; a < srcs.size(); ++a) {
      rows.push_back(aggregate(param, P, source_name(srcs[a]), proposed[a], [P](const TrialResult& t) {
        return t.outcome == Outcome::feasible && t.power <= P;
      }));
    }
    if (spec.baseline) {
      rows.push_back(aggregate(param, P, "mrt", mrt[g], [](const TrialResult& t) {
        return t.outcome == Outcome::feasible;
      }));
    }
  }
  return rows;
}

std::vector<ResultRow> sweep_run(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.sweep_param == SweepParam::power_w) return feasibility_curve(spec, spec.sweep_values);
  const std::string param = to_string(spec.sweep_param);
  std::vector<ResultRow> rows;
  for (double v : spec.sweep_values) {
    const SystemConfig cfg = apply_sweep_value(spec.scenario, spec.sweep_param, v);
    for (CovarianceSource src : sources(spec.approach)) {
      std::vector<TrialResult> res(static_cast<std::size_t>(spec.trials));
      parallel_for(spec.trials, spec.workers,
                   [&](int t) { res[static_cast<std::size_t>(t)] = run_trial(spec, cfg, t, src); });
      rows.push_back(aggregate(param, v, source_name(src), res, [](const TrialResult& t) {
        return t.outcome == Outcome::feasible;
      }));
    }
  }
  return rows;
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += r.sweep_param + ',' + fmt9(r.sweep_value) + ',' + r.approach + ',' +
           fmt9(r.mean_power_w) + ',' + fmt9(r.feasibility) + ',' + fmt9(r.mc_outage) + ',' +
           fmt9(r.iot_margin_bpshz) + ',' + fmt9(r.dc_iters) + ',' + r.failures.format() + '\n';
  }
  return out;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error(ErrorCode::parse_error, "missing or unexpected CSV header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw Error(ErrorCode::parse_error, "expected 9 fields: " + line);
    ResultRow r;
    r.sweep_param = f[0];
    r.sweep_value = parse_csv_real(f[1]);
    r.approach = f[2];
    r.mean_power_w = parse_csv_real(f[3]);
    r.feasibility = parse_csv_real(f[4]);
    r.mc_outage = parse_csv_real(f[5]);
    r.iot_margin_bpshz = parse_csv_real(f[6]);
    r.dc_iters = parse_csv_real(f[7]);
    r.failures = FailureCounts::parse(f[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot open '" + path + "' for writing");
  out << format_csv(rows);
  if (!out) throw Error(ErrorCode::io_error, "write failed for '" + path + "'");
}

}  // namespace srbf
