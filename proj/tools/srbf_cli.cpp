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

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitSolverFailure = 3;
constexpr int kExitBadConfig = 4;

int exit_code_for(srbf::ErrorCode code) {
  switch (code) {
    case srbf::ErrorCode::invalid_config:
    case srbf::ErrorCode::parse_error:
    case srbf::ErrorCode::io_error:
    case srbf::ErrorCode::invalid_probability:
    case srbf::ErrorCode::nonpositive_distance:
    case srbf::ErrorCode::dimension_mismatch:
      return kExitBadConfig;
    default:
      return kExitSolverFailure;
  }
}

json complex_matrix(const srbf::CMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    json c = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(r);
    im.push_back(c);
  }
  return {{"re", re}, {"im", im}};
}

srbf::CMatrix complex_matrix(const json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  const auto rows = static_cast<Eigen::Index>(re.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(re.at(0).size()) : 0;
  srbf::CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(i, c) = {re.at(i).at(c).get<double>(), im.at(i).at(c).get<double>()};
    }
  }
  return m;
}

json report_json(const srbf::FeasibilityReport& rep) {
  json users = json::array();
  for (std::size_t k = 0; k < rep.outage.size(); ++k) {
    users.push_back({{"outage", rep.outage[k].probability},
                     {"outage_stderr", rep.outage[k].stderr_},
                     {"outage_ok", static_cast<bool>(rep.outage_ok[k])},
                     {"iot_rate_bpshz", rep.iot_rate[k]},
                     {"iot_margin_bpshz", rep.iot_margin[k]},
                     {"iot_ok", static_cast<bool>(rep.iot_ok[k])}});
  }
  return {{"all_ok", rep.all_ok()}, {"users", users}};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw srbf::Error(srbf::ErrorCode::io_error, "cannot open '" + path + "'");
  out << text;
}

srbf::CovarianceSource source_of(const std::string& approach) {
  if (approach == "csi") return srbf::CovarianceSource::exact;
  if (approach == "doa") return srbf::CovarianceSource::doa;
  throw srbf::Error(srbf::ErrorCode::invalid_config, "solve takes --approach csi or doa");
}

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::string approach;
  std::optional<int> trials;
  std::optional<long> mc_samples;
  std::string solution;
  int workers = 1;
  bool baseline = true;
};

int run_solve(const Options& o) {
  const srbf::SystemConfig cfg = o.config.empty() ? srbf::SystemConfig::reference()
                                                  : srbf::load_scenario(o.config);
  const std::string approach = o.approach.empty() ? "csi" : o.approach;
  const srbf::ChannelSet chs = srbf::make_channels(cfg, o.seed);
  srbf::SolverParams params;
  params.randomization_seed = o.seed;
  const srbf::BeamformingSolution sol = srbf::minimize_power(chs, cfg, source_of(approach), params);
  const auto& d = sol.diagnostics;

  std::printf("status        %s\n", srbf::to_string(sol.status));
  std::printf("sdr status    %s\n", srbf::to_string(d.sdr_status));
  std::printf("total power   %.9g W\n", sol.total_power);
  std::printf("conic iters   %d\n", d.conic_iterations);
  std::printf("dc iters      %d\n", d.dc_iterations);
  std::printf("rank gap      %.3e\n", d.final_rank_gap);
  std::printf("randomized    %s\n", d.randomization_used ? "yes" : "no");
  std::printf("complexity    %.3e\n", d.complexity_estimate);

  if (!o.out.empty()) {
    json j = {{"status", srbf::to_string(sol.status)},
              {"approach", approach},
              {"seed", o.seed},
              {"total_power_w", sol.total_power},
              {"mu", sol.mu},
              {"diagnostics",
               {{"sdr_status", srbf::to_string(d.sdr_status)},
                {"conic_iterations", d.conic_iterations},
                {"dc_iterations", d.dc_iterations},
                {"final_rank_gap", d.final_rank_gap},
                {"randomization_used", d.randomization_used},
                {"primal_residual", d.primal_residual},
                {"dual_residual", d.dual_residual},
                {"duality_gap", d.duality_gap},
                {"cone_violation", d.cone_violation},
                {"complexity_estimate", d.complexity_estimate},
                {"rank_gap_trace", d.rank_gap_trace},
                {"penalized_objective", d.penalized_objective}}}};
    if (sol.status == srbf::SolutionStatus::optimal) j["w"] = complex_matrix(sol.w.w);
    write_text(o.out, j.dump(2) + "\n");
  }
  switch (sol.status) {
    case srbf::SolutionStatus::optimal: return kExitOk;
    case srbf::SolutionStatus::infeasible: return kExitInfeasible;
    default: return kExitSolverFailure;
  }
}

srbf::ExperimentSpec load_spec(const Options& o) {
  srbf::ExperimentSpec spec =
      o.config.empty() ? srbf::ExperimentSpec{} : srbf::load_experiment(o.config);
  if (o.seed != 0) spec.seed = o.seed;
  if (o.trials) spec.trials = *o.trials;
  if (o.mc_samples) spec.mc_samples = *o.mc_samples;
  if (!o.approach.empty()) spec.approach = srbf::parse_approach(o.approach);
  spec.workers = o.workers;
  return spec;
}

int run_sweep(const Options& o) {
  const srbf::ExperimentSpec spec = load_spec(o);
  const auto rows = srbf::sweep_run(spec);
  write_text(o.out, srbf::format_csv(rows));
  return kExitOk;
}

int run_feasibility(const Options& o) {
  srbf::ExperimentSpec spec = load_spec(o);
  spec.baseline = o.baseline;
  if (spec.sweep_param != srbf::SweepParam::power_w) {
    throw srbf::Error(srbf::ErrorCode::invalid_config, "feasibility needs power_grid in the config");
  }
  const auto rows = srbf::feasibility_curve(spec, spec.sweep_values);
  write_text(o.out, srbf::format_csv(rows));
  return kExitOk;
}

int run_validate(const Options& o) {
  if (o.solution.empty()) {
    throw srbf::Error(srbf::ErrorCode::invalid_config, "validate needs --solution");
  }
  const srbf::SystemConfig cfg = o.config.empty() ? srbf::SystemConfig::reference()
                                                  : srbf::load_scenario(o.config);
  json j;
  try {
    j = json::parse(srbf::read_text_file(o.solution));
  } catch (const json::exception& e) {
    throw srbf::Error(srbf::ErrorCode::parse_error, e.what());
  }
  if (!j.contains("w")) {
    throw srbf::Error(srbf::ErrorCode::invalid_config, "solution file has no beamformers");
  }
  const std::uint64_t seed = j.value("seed", o.seed);
  const srbf::ChannelSet chs = srbf::make_channels(cfg, seed);
  srbf::BeamformerSet w;
  try {
    w = srbf::BeamformerSet(complex_matrix(j.at("w")));
  } catch (const json::exception& e) {
    throw srbf::Error(srbf::ErrorCode::parse_error, e.what());
  }
  const long n = o.mc_samples.value_or(100000);
  const srbf::FeasibilityReport rep = srbf::check_feasibility(chs, cfg, w, n, o.seed);
  const json out = {{"total_power_w", w.total_power()}, {"mc_samples", n}, {"report", report_json(rep)}};
  write_text(o.out, out.dump(2) + "\n");
  return rep.all_ok() ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outage-robust beamforming for symbiotic radio"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "scenario or experiment file");
    sub->add_option("--seed", o.seed, "channel / experiment seed");
    sub->add_option("--out", o.out, "output path, '-' for stdout");
  };
  auto* solve = app.add_subcommand("solve", "solve one scenario");
  common(solve);
  solve->add_option("--approach", o.approach, "csi or doa")->check(CLI::IsMember({"csi", "doa"}));

  auto* sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
  auto* feas = app.add_subcommand("feasibility", "feasibility versus transmit power to CSV");
  for (auto* sub : {sweep, feas}) {
    common(sub);
    sub->add_option("--approach", o.approach, "csi, doa or both")
        ->check(CLI::IsMember({"csi", "doa", "both"}));
    sub->add_option("--trials", o.trials, "channel realizations per grid point");
    sub->add_option("--mc-samples", o.mc_samples, "Monte Carlo samples for validation");
    sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  }
  feas->add_flag("!--no-baseline", o.baseline, "omit the MRT rows");

  auto* validate = app.add_subcommand("validate", "Monte Carlo check of a saved solution");
  common(validate);
  validate->add_option("--solution", o.solution, "JSON written by solve --out");
  validate->add_option("--mc-samples", o.mc_samples, "Monte Carlo samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitBadConfig;
  }

  try {
    if (*solve) return run_solve(o);
    if (*sweep) return run_sweep(o);
    if (*feas) return run_feasibility(o);
    if (*validate) return run_validate(o);
  } catch (const srbf::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  }
  return kExitOk;
}
