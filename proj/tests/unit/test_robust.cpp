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

#include "srbf/robust.hpp"
#include "srbf/srmodel.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using srbf::CMatrix;
using srbf::CVector;
using srbf::HermitianMatrix;
using srbf::SystemConfig;

SystemConfig general_config(int K, int L) {
  SystemConfig cfg = SystemConfig::reference();
  cfg.model = srbf::ChannelModel::general;
  cfg.K = K;
  cfg.L = L;
  cfg.noise_power_k.assign(K, cfg.noise_power_k[0]);
  cfg.user_distances.assign(K, 190.0);
  cfg.rate_target_cellular_k.assign(K, 3.0);
  cfg.rate_target_iot_k.assign(K, 0.12);
  return cfg;
}

struct Instance {
  SystemConfig cfg;
  srbf::ChannelSet chs;
  srbf::RobustProblemData data;
  CMatrix w;
  std::vector<HermitianMatrix> W;
};

Instance seeded_instance(std::uint64_t seed, int K = 2, int L = 8) {
  Instance in;
  in.cfg = general_config(K, L);
  in.chs = srbf::sample_general_channels(in.cfg, seed);
  in.data = srbf::make_robust_data(in.chs.f, srbf::covariances_exact(in.chs, in.cfg), in.cfg);
  srbf::Rng rng(seed + 1000);
  srbf::ComplexGaussian cn(0.01);
  in.w.resize(in.cfg.M, K);
  for (int k = 0; k < K; ++k) in.w.col(k) = cn.vector(rng, in.cfg.M);
  for (int k = 0; k < K; ++k) in.W.push_back(HermitianMatrix::outer(in.w.col(k)));
  return in;
}

TEST(SphereRadius, ReferenceValues) {
  EXPECT_NEAR(srbf::sphere_radius(0.1, 6), std::sqrt(18.5493 / 2.0), 1e-4);
  EXPECT_NEAR(srbf::sphere_radius(0.1, 6), 3.0455, 1e-4);
  EXPECT_NEAR(srbf::sphere_radius(0.05, 1), std::sqrt(5.991464547 / 2.0), 1e-9);
  EXPECT_NEAR(srbf::sphere_radius(0.05, 1), 1.730818, 1e-6);
  EXPECT_GT(srbf::sphere_radius(0.01, 6), srbf::sphere_radius(0.1, 6));
  EXPECT_THROW(srbf::sphere_radius(0.0, 6), srbf::Error);
}

TEST(RobustData, RejectsNonpositiveTargets) {
  SystemConfig cfg = SystemConfig::reference();
  const srbf::ChannelSet chs = srbf::make_channels(cfg, 0);
  const auto cov = srbf::covariances_exact(chs, cfg);
  cfg.rate_target_iot_k = {0.0, 0.12};
  EXPECT_THROW(srbf::make_robust_data(chs.f, cov, cfg), srbf::Error);
}

TEST(LmiBlock, ZeroPowerIsNotCertified) {
  const Instance in = seeded_instance(1);
  std::vector<HermitianMatrix> zero(2, HermitianMatrix::zero(6));
  const HermitianMatrix b = srbf::lmi_block(zero, 0.0, in.data, 0);
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) {
      const double expected = (i == 6 && j == 6) ? -in.data.users[0].sigma2 : 0.0;
      EXPECT_EQ(b(i, j), srbf::cdouble(expected, 0.0));
    }
  }
  EXPECT_FALSE(srbf::lmi_certified(b, in.data.users[0].sigma2));
}

TEST(LmiBlock, IdentityCovarianceSubstitution) {
  srbf::RobustProblemData data;
  data.M = 3;
  data.N = 16;
  data.d = 2.0;
  srbf::RobustUserData u;
  u.C = HermitianMatrix::identity(3);
  u.C_half = HermitianMatrix::identity(3);
  u.f = CVector::Unit(3, 0);
  u.gamma_s = 7.0;
  u.gamma_c = 3.0;
  u.sigma2 = 0.5;
  data.users.push_back(u);
  const double p = 1.5;
  const HermitianMatrix b = srbf::lmi_block({HermitianMatrix::outer(CVector::Unit(3, 0)) * p}, 0.0, data, 0);
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = p / 7.0;
  expected(0, 3) = p / 7.0;
  expected(3, 0) = p / 7.0;
  expected(3, 3) = p / 7.0 - 0.5;
  EXPECT_LT((b.mat() - expected).norm(), 1e-15);
}

TEST(LmiBlock, MatchesBarredFormsFromBeamformers) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance in = seeded_instance(seed);
    const int M = in.cfg.M;
    const double mu = 0.3 * in.data.users[0].sigma2;
    for (int k = 0; k < 2; ++k) {
      const auto& u = in.data.users[k];
      // A_k = w_k w_k^H / gamma_s - sum_{i != k} w_i w_i^H, entry by entry.
      CMatrix A(M, M);
      for (int m = 0; m < M; ++m) {
        for (int n = 0; n < M; ++n) {
          srbf::cdouble v = in.w(m, k) * std::conj(in.w(n, k)) / u.gamma_s;
          for (int i = 0; i < 2; ++i) {
            if (i != k) v -= in.w(m, i) * std::conj(in.w(n, i));
          }
          A(m, n) = v;
        }
      }
      const CMatrix& S = u.C_half.mat();
      const CVector fh = u.f.conjugate();
      const CMatrix Q = S * A * S;
      const CVector r = S * A * fh;
      const srbf::cdouble s = (u.f.transpose() * A * fh)(0) - u.sigma2;
      CMatrix expected(M + 1, M + 1);
      expected.topLeftCorner(M, M) = Q + mu * CMatrix::Identity(M, M);
      expected.topRightCorner(M, 1) = r;
      expected.bottomLeftCorner(1, M) = r.adjoint();
      expected(M, M) = s - mu * in.data.d * in.data.d;
      const HermitianMatrix b = srbf::lmi_block(in.W, mu, in.data, k);
      const double scale = std::max(expected.cwiseAbs().maxCoeff(), u.sigma2);
      EXPECT_LE((b.mat() - expected).cwiseAbs().maxCoeff(), 1e-12 * scale) << seed;
    }
  }
}

TEST(LmiBlock, QuadraticFormIsSinrMargin) {
  // [e^H; 1]^H block(mu = 0) [e^H; 1] = |(f + e C^{1/2}) w_k|^2 / gamma_s
  //                                    - sum_{i != k} |(f + e C^{1/2}) w_i|^2 - sigma^2
  const Instance in = seeded_instance(3);
  srbf::Rng rng(4);
  srbf::ComplexGaussian cn(1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = trial % 2;
    const auto& u = in.data.users[k];
    const CVector e = cn.vector(rng, 6);
    const Eigen::RowVectorXcd f_eff = u.f.transpose() + e.transpose() * u.C_half.mat();
    double margin = -u.sigma2;
    for (int i = 0; i < 2; ++i) {
      const double p = std::norm((f_eff * in.w.col(i))(0));
      margin += (i == k) ? p / u.gamma_s : -p;
    }
    CVector v(7);
    v.head(6) = e.conjugate();
    v(6) = 1.0;
    const double quad = (v.adjoint() * srbf::lmi_block(in.W, 0.0, in.data, k).mat() * v)(0).real();
    EXPECT_NEAR(quad, margin, 1e-10 * std::max(std::abs(margin), u.sigma2));
  }
}

TEST(LmiBlock, Affine) {
  const Instance x = seeded_instance(5);
  const Instance y = seeded_instance(6);
  const double a = 0.7;
  const double b = -1.9;
  const double mx = 2e-13;
  const double my = 5e-13;
  std::vector<HermitianMatrix> combo;
  for (int i = 0; i < 2; ++i) combo.push_back(x.W[i] * a + y.W[i] * b);
  std::vector<HermitianMatrix> zero(2, HermitianMatrix::zero(6));
  for (int k = 0; k < 2; ++k) {
    const CMatrix lhs = srbf::lmi_block(combo, a * mx + b * my, x.data, k).mat();
    const CMatrix rhs = a * srbf::lmi_block(x.W, mx, x.data, k).mat() +
                        b * srbf::lmi_block(y.W, my, x.data, k).mat() +
                        (1.0 - a - b) * srbf::lmi_block(zero, 0.0, x.data, k).mat();
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12 * std::max(1e-13, rhs.cwiseAbs().maxCoeff()));
  }
}

TEST(IotTrace, ZeroPower) {
  const Instance in = seeded_instance(7);
  std::vector<HermitianMatrix> zero(2, HermitianMatrix::zero(6));
  EXPECT_EQ(srbf::iot_trace_lhs(zero, in.data, 1), -in.data.users[1].sigma2);
}

TEST(IotTrace, RankOneMatchesRateRearrangement) {
  for (std::uint64_t seed = 10; seed < 30; ++seed) {
    const Instance in = seeded_instance(seed);
    const srbf::BeamformerSet bf(in.w);
    for (int k = 0; k < 2; ++k) {
      const auto& u = in.data.users[k];
      double own = 0.0;
      double interference = 0.0;
      for (int l = 0; l < in.chs.devices(); ++l) {
        const double a2 = std::norm(in.cfg.alpha * in.chs.g(l, k));
        own += a2 * std::norm((in.chs.h.row(l) * in.w.col(k))(0));
        for (int i = 0; i < 2; ++i) {
          if (i != k) interference += a2 * std::norm((in.chs.h.row(l) * in.w.col(i))(0));
        }
      }
      for (int i = 0; i < 2; ++i) {
        if (i != k) interference += std::norm((in.chs.f.row(k) * in.w.col(i))(0));
      }
      const double expected = in.cfg.N * own / u.gamma_c - interference - u.sigma2;
      const double lhs = srbf::iot_trace_lhs(in.W, in.data, k);
      EXPECT_NEAR(lhs, expected, 1e-12 * (interference + u.sigma2 + in.cfg.N * own / u.gamma_c));
      const double rate = srbf::iot_sum_rate(in.chs, in.cfg, bf, k);
      if (lhs >= 0.0) EXPECT_GE(rate, in.cfg.rate_target_iot_k[k] - 1e-9);
      if (lhs < 0.0) EXPECT_LT(rate, in.cfg.rate_target_iot_k[k] + 1e-9);
    }
  }
}

TEST(IotTrace, Homogeneous) {
  const Instance in = seeded_instance(31);
  const double t = 3.7;
  std::vector<HermitianMatrix> scaled;
  for (const auto& Wi : in.W) scaled.push_back(Wi * t);
  for (int k = 0; k < 2; ++k) {
    const double s2 = in.data.users[k].sigma2;
    const double base = srbf::iot_trace_lhs(in.W, in.data, k) + s2;
    EXPECT_NEAR(srbf::iot_trace_lhs(scaled, in.data, k) + s2, t * base, 1e-12 * std::abs(t * base));
  }
}

TEST(LmiCertified, RelativeTolerance) {
  EXPECT_TRUE(srbf::lmi_certified(HermitianMatrix::diagonal(Eigen::Vector2d(1.0, -5e-10))));
  EXPECT_FALSE(srbf::lmi_certified(HermitianMatrix::diagonal(Eigen::Vector2d(1.0, -2e-9))));
  EXPECT_TRUE(srbf::lmi_certified(HermitianMatrix::diagonal(Eigen::Vector2d(1e-13, -5e-23)), 1e-13));
}

}  // namespace
