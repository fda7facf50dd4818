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

#include "srbf/conic.hpp"
#include "srbf/scenario_io.hpp"
#include "srbf/solver.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>

namespace {

using srbf::CMatrix;
using srbf::ConicProgram;
using srbf::ConicStatus;

CMatrix unit_entry(int dim, int i, int j) {
  CMatrix e = CMatrix::Zero(dim, dim);
  e(i, j) = 1.0;
  if (i != j) e(j, i) = 1.0;
  return e;
}

TEST(ConicSolve, ScalarLowerBound) {
  ConicProgram prog;
  const int x = prog.add_variables(1);
  prog.set_objective(x, 1.0);
  prog.add_linear_geq(-3.0, {{x, 1.0}});
  const auto sol = srbf::conic_solve(prog);
  ASSERT_EQ(sol.status, ConicStatus::optimal);
  EXPECT_NEAR(sol.x(0), 3.0, 1e-7);
  EXPECT_NEAR(sol.primal_objective, 3.0, 1e-7);
}

TEST(ConicSolve, TraceOverIdentityBound) {
  // Real symmetric W = [[a, b], [b, c]] with W - I >= 0.
  ConicProgram prog;
  const int v = prog.add_variables(3);
  prog.set_objective(v, 1.0);
  prog.set_objective(v + 2, 1.0);
  srbf::PsdConstraint con;
  con.dim = 2;
  con.constant = -CMatrix::Identity(2, 2);
  con.terms = {{v, unit_entry(2, 0, 0)}, {v + 1, unit_entry(2, 0, 1)}, {v + 2, unit_entry(2, 1, 1)}};
  prog.add_psd(con);
  const auto sol = srbf::conic_solve(prog);
  ASSERT_EQ(sol.status, ConicStatus::optimal);
  EXPECT_NEAR(sol.primal_objective, 2.0, 1e-7);
  EXPECT_NEAR(sol.x(0), 1.0, 1e-6);
  EXPECT_NEAR(sol.x(1), 0.0, 1e-6);
  EXPECT_NEAR(sol.x(2), 1.0, 1e-6);
  EXPECT_LE(sol.cone_violation, 1e-8);
}

TEST(ConicSolve, ComplexHermitianBlock) {
  // minimize t subject to [[t, 1 + j], [1 - j, t]] >= 0: optimum t = sqrt(2).
  ConicProgram prog;
  const int t = prog.add_variables(1);
  prog.set_objective(t, 1.0);
  srbf::PsdConstraint con;
  con.dim = 2;
  con.constant = CMatrix::Zero(2, 2);
  con.constant(0, 1) = srbf::cdouble(1.0, 1.0);
  con.constant(1, 0) = srbf::cdouble(1.0, -1.0);
  con.terms = {{t, CMatrix::Identity(2, 2)}};
  prog.add_psd(con);
  const auto sol = srbf::conic_solve(prog);
  ASSERT_EQ(sol.status, ConicStatus::optimal);
  EXPECT_NEAR(sol.x(0), std::sqrt(2.0), 1e-7);
}

TEST(ConicSolve, SecondOrderCone) {
  // minimize t subject to ||(x - 3, y + 4)|| <= t: optimum 0 at (3, -4).
  ConicProgram prog;
  const int v = prog.add_variables(3);
  prog.set_objective(v + 2, 1.0);
  srbf::SocConstraint soc;
  soc.dim = 3;
  soc.constant = Eigen::Vector3d(0.0, -3.0, 4.0);
  soc.terms = {{v, Eigen::Vector3d(0.0, 1.0, 0.0)},
               {v + 1, Eigen::Vector3d(0.0, 0.0, 1.0)},
               {v + 2, Eigen::Vector3d(1.0, 0.0, 0.0)}};
  prog.add_soc(soc);
  const auto sol = srbf::conic_solve(prog);
  ASSERT_EQ(sol.status, ConicStatus::optimal);
  EXPECT_NEAR(sol.x(2), 0.0, 1e-6);
  EXPECT_NEAR(sol.x(0), 3.0, 1e-4);
  EXPECT_NEAR(sol.x(1), -4.0, 1e-4);
}

TEST(ConicSolve, SecondOrderConeActive) {
  // minimize t subject to ||(x, y)|| <= t and x + y >= 2: optimum sqrt(2).
  ConicProgram prog;
  const int v = prog.add_variables(3);
  prog.set_objective(v + 2, 1.0);
  srbf::SocConstraint soc;
  soc.dim = 3;
  soc.constant = Eigen::Vector3d::Zero();
  soc.terms = {{v, Eigen::Vector3d(0.0, 1.0, 0.0)},
               {v + 1, Eigen::Vector3d(0.0, 0.0, 1.0)},
               {v + 2, Eigen::Vector3d(1.0, 0.0, 0.0)}};
  prog.add_soc(soc);
  prog.add_linear_geq(-2.0, {{v, 1.0}, {v + 1, 1.0}});
  const auto sol = srbf::conic_solve(prog);
  ASSERT_EQ(sol.status, ConicStatus::optimal);
  EXPECT_NEAR(sol.primal_objective, std::sqrt(2.0), 1e-7);
  EXPECT_NEAR(sol.x(0), 1.0, 1e-6);
  EXPECT_NEAR(sol.x(1), 1.0, 1e-6);
}

TEST(ConicSolve, DetectsInfeasible) {
  ConicProgram prog;
  const int x = prog.add_variables(1);
  prog.set_objective(x, 1.0);
  prog.add_linear_geq(-3.0, {{x, 1.0}});
  prog.add_linear_geq(1.0, {{x, -1.0}});
  EXPECT_EQ(srbf::conic_solve(prog).status, ConicStatus::infeasible);
}

TEST(ConicSolve, DetectsUnbounded) {
  ConicProgram prog;
  const int x = prog.add_variables(1);
  prog.set_objective(x, 1.0);
  prog.add_linear_geq(3.0, {{x, -1.0}});
  EXPECT_EQ(srbf::conic_solve(prog).status, ConicStatus::unbounded);
}

TEST(ConicSolve, Deterministic) {
  ConicProgram prog;
  const int v = prog.add_variables(3);
  prog.set_objective(v, 1.0);
  prog.set_objective(v + 2, 2.0);
  srbf::PsdConstraint con;
  con.dim = 2;
  con.constant = CMatrix::Zero(2, 2);
  con.constant(0, 1) = 1.0;
  con.constant(1, 0) = 1.0;
  con.terms = {{v, unit_entry(2, 0, 0)}, {v + 1, unit_entry(2, 0, 1)}, {v + 2, unit_entry(2, 1, 1)}};
  prog.add_psd(con);
  const auto a = srbf::conic_solve(prog);
  const auto b = srbf::conic_solve(prog);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(ConicProgram, RejectsMalformedData) {
  ConicProgram prog;
  const int x = prog.add_variables(1);
  srbf::PsdConstraint con;
  con.dim = 2;
  con.constant = CMatrix::Zero(3, 3);
  con.terms = {{x, CMatrix::Identity(2, 2)}};
  prog.add_psd(con);
  EXPECT_THROW(prog.check(), srbf::Error);
}

TEST(RelaxedProgram, StructuralCounts) {
  const srbf::SystemConfig cfg = srbf::SystemConfig::reference();
  const srbf::ChannelSet chs = srbf::make_channels(cfg, 0);
  const auto data = srbf::make_robust_data(chs.f, srbf::covariances_exact(chs, cfg), cfg);
  const auto layout = srbf::make_layout(data);
  const ConicProgram prog = srbf::assemble_p3(data, layout);
  int psd_m = 0;
  int psd_m1 = 0;
  int scalar = 0;
  for (const auto& c : prog.psd()) {
    if (c.dim == cfg.M) ++psd_m;
    if (c.dim == cfg.M + 1) ++psd_m1;
    if (c.dim == 1) ++scalar;
  }
  EXPECT_EQ(prog.variables(), cfg.K * cfg.M * cfg.M + cfg.K);
  EXPECT_EQ(psd_m, cfg.K);
  EXPECT_EQ(psd_m1, cfg.K);
  EXPECT_EQ(scalar, 2 * cfg.K);  // IoT inequalities and mu >= 0
  EXPECT_TRUE(prog.soc().empty());
}

TEST(RelaxedProgram, MatchesFrozenCrossSolverReference) {
  using json = nlohmann::json;
  const json inst = json::parse(srbf::read_text_file(SRBF_ORACLE_DIR "/p3_instance.json"));
  const json ref = json::parse(srbf::read_text_file(SRBF_ORACLE_DIR "/p3_reference.json"));
  srbf::SystemConfig cfg = srbf::SystemConfig::reference();
  cfg.model = srbf::ChannelModel::general;
  cfg.L = 8;
  cfg.noise_power_k = inst.at("noise_power_w").get<std::vector<double>>();
  cfg.rate_target_cellular_k = inst.at("rate_target_cellular").get<std::vector<double>>();
  cfg.rate_target_iot_k = inst.at("rate_target_iot").get<std::vector<double>>();
  cfg.outage_target = inst.at("outage_target").get<double>();
  const int M = inst.at("M").get<int>();
  CMatrix f(2, M);
  srbf::CovarianceSet cov;
  for (int k = 0; k < 2; ++k) {
    const json& u = inst.at("users").at(k);
    CMatrix C(M, M);
    for (int m = 0; m < M; ++m) {
      f(k, m) = {u.at("f_re").at(m).get<double>(), u.at("f_im").at(m).get<double>()};
      for (int n = 0; n < M; ++n) {
        C(m, n) = {u.at("C_re").at(m).at(n).get<double>(), u.at("C_im").at(m).at(n).get<double>()};
      }
    }
    cov.C.emplace_back(C);
  }
  const auto data = srbf::make_robust_data(f, cov, cfg);
  const auto layout = srbf::make_layout(data);
  srbf::ConicSolverParams cp; cp.verbose = getenv("V") != nullptr;
  const auto sol = srbf::conic_solve(srbf::assemble_p3(data, layout), cp);
  ASSERT_EQ(sol.status, ConicStatus::optimal);
  double power = 0.0;
  for (const auto& W : layout.lifted(sol.x)) power += W.trace();
  const double expected = ref.at("total_power_w").get<double>();
  EXPECT_NEAR(power / expected, 1.0, 1e-6);
  EXPECT_LE(sol.primal_residual, 1e-8);
  EXPECT_LE(sol.dual_residual, 1e-8);
}

}  // namespace
