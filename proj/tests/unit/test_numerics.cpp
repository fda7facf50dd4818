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

#include "srbf/numerics.hpp"
#include "srbf/random.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace {

using srbf::CMatrix;
using srbf::CVector;
using srbf::HermitianMatrix;

CMatrix random_complex(int rows, int cols, srbf::Rng& rng) {
  srbf::ComplexGaussian cn;
  CMatrix a(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) a(i, j) = cn(rng);
  }
  return a;
}

HermitianMatrix random_hermitian(int dim, srbf::Rng& rng) {
  const CMatrix a = random_complex(dim, dim, rng);
  return HermitianMatrix(CMatrix(0.5 * (a + a.adjoint())));
}

HermitianMatrix random_psd(int dim, int rank, srbf::Rng& rng) {
  const CMatrix b = random_complex(dim, rank, rng);
  return HermitianMatrix(CMatrix(b * b.adjoint()));
}

TEST(HermitianMatrix, RejectsNonHermitian) {
  CMatrix a = CMatrix::Identity(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(HermitianMatrix{a}, srbf::Error);
  EXPECT_THROW(HermitianMatrix{CMatrix::Zero(2, 3)}, srbf::Error);
}

TEST(HermitianMatrix, SymmetrizesWithinTolerance) {
  CMatrix a = CMatrix::Identity(2, 2);
  a(0, 1) = srbf::cdouble(1.0, 1e-14);
  a(1, 0) = 1.0;
  const HermitianMatrix h(a);
  EXPECT_EQ(h(0, 1), std::conj(h(1, 0)));
}

TEST(ChiSquare, ZeroProbabilityIsZero) {
  EXPECT_EQ(srbf::chi_square_inv_cdf(0.0, 12), 0.0);
}

TEST(ChiSquare, TwoDofClosedForm) {
  for (double p : {0.01, 0.05, 0.1, 0.5, 0.9, 0.95, 0.99}) {
    EXPECT_NEAR(srbf::chi_square_inv_cdf(p, 2), -2.0 * std::log1p(-p), 1e-9) << p;
  }
  EXPECT_NEAR(srbf::chi_square_inv_cdf(0.95, 2), 5.991465, 1e-6);
}

TEST(ChiSquare, TwelveDofTabulated) {
  EXPECT_NEAR(srbf::chi_square_inv_cdf(0.9, 12), 18.549, 1e-3);
}

TEST(ChiSquare, InvertsIndependentGammaCdf) {
  for (int dof : {2, 4, 12, 24}) {
    for (int i = 1; i <= 99; ++i) {
      const double p = i / 100.0;
      const double x = srbf::chi_square_inv_cdf(p, dof);
      EXPECT_NEAR(boost::math::gamma_p(0.5 * dof, 0.5 * x), p, 1e-9) << dof << " " << p;
      EXPECT_NEAR(x, 2.0 * boost::math::gamma_p_inv(0.5 * dof, p), 1e-9 * std::max(1.0, x));
    }
  }
}

TEST(ChiSquare, RejectsBadArguments) {
  EXPECT_THROW(srbf::chi_square_inv_cdf(1.0, 4), srbf::Error);
  EXPECT_THROW(srbf::chi_square_inv_cdf(-0.1, 4), srbf::Error);
  EXPECT_THROW(srbf::chi_square_inv_cdf(0.5, 0), srbf::Error);
}

TEST(RegularizedGamma, MatchesBoostOnBothBranches) {
  for (double a : {0.5, 1.0, 3.0, 6.0, 12.0}) {
    for (double x : {0.1, 1.0, 4.0, 10.0, 30.0}) {
      EXPECT_NEAR(srbf::regularized_lower_gamma(a, x), boost::math::gamma_p(a, x), 1e-13);
    }
  }
}

TEST(HermitianSqrt, IdentityAndDiagonal) {
  const HermitianMatrix i3 = HermitianMatrix::identity(3);
  EXPECT_LT((srbf::hermitian_sqrt(i3).mat() - i3.mat()).norm(), 1e-14);
  const HermitianMatrix d = HermitianMatrix::diagonal(Eigen::Vector2d(4.0, 9.0));
  const CMatrix s = srbf::hermitian_sqrt(d).mat();
  EXPECT_NEAR(s(0, 0).real(), 2.0, 1e-14);
  EXPECT_NEAR(s(1, 1).real(), 3.0, 1e-14);
  EXPECT_NEAR(std::abs(s(0, 1)), 0.0, 1e-14);
}

TEST(HermitianSqrt, SquareReconstructsSeededPsd) {
  srbf::Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 2 + trial % 15;
    const int rank = 1 + trial % dim;
    const HermitianMatrix c = random_psd(dim, rank, rng);
    const CMatrix s = srbf::hermitian_sqrt(c).mat();
    EXPECT_LE((s * s - c.mat()).norm(), 1e-8 * c.frobenius_norm()) << trial;
  }
}

TEST(HermitianSqrt, RejectsIndefinite) {
  const HermitianMatrix a = HermitianMatrix::diagonal(Eigen::Vector2d(1.0, -0.5));
  EXPECT_THROW(srbf::hermitian_sqrt(a), srbf::Error);
}

TEST(LeadingEigpair, ResidualBoundOnSeededMatrices) {
  srbf::Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 2 + trial % 15;
    const HermitianMatrix w = random_hermitian(dim, rng);
    const srbf::EigPair ep = srbf::leading_eigpair(w);
    const double residual = (w.mat() * ep.vector - ep.value * ep.vector).norm();
    EXPECT_LE(residual, 1e-9 * std::max(1.0, w.frobenius_norm())) << trial;
    EXPECT_NEAR(ep.vector.norm(), 1.0, 1e-12);
    const auto eig = srbf::hermitian_eig(w);
    EXPECT_NEAR(ep.value, eig.values(dim - 1), 1e-10 * std::max(1.0, std::abs(ep.value)));
  }
}

TEST(LeadingEigpair, PhaseConvention) {
  CVector u(3);
  u << srbf::cdouble(0.0, 0.6), srbf::cdouble(0.0, 0.0), srbf::cdouble(0.8, 0.0);
  const srbf::EigPair ep = srbf::leading_eigpair(HermitianMatrix::outer(u));
  EXPECT_NEAR(ep.vector(0).imag(), 0.0, 1e-14);
  EXPECT_GT(ep.vector(0).real(), 0.0);
  EXPECT_NEAR(ep.value, 1.0, 1e-12);
}

TEST(ProjectPsd, ClipsNegativeMass) {
  const HermitianMatrix a = HermitianMatrix::diagonal(Eigen::Vector3d(2.0, -0.25, -0.5));
  double mass = 0.0;
  const HermitianMatrix p = srbf::project_psd(a, &mass);
  EXPECT_NEAR(mass, 0.75, 1e-14);
  EXPECT_NEAR(srbf::min_eigenvalue(p), 0.0, 1e-14);
  EXPECT_NEAR(p.trace(), 2.0, 1e-14);
}

TEST(Sinc, ReferenceValues) {
  EXPECT_EQ(srbf::sinc(0.0), 1.0);
  EXPECT_NEAR(srbf::sinc(std::numbers::pi), 0.0, 1e-12);
  EXPECT_NEAR(srbf::sinc(0.5), std::sin(0.5) / 0.5, 1e-15);
  EXPECT_NEAR(srbf::sinc(0.5), 0.958851, 1e-6);
}

TEST(Sinc, EvenAndBounded) {
  for (double x = -50.0; x <= 50.0; x += 0.37) {
    EXPECT_EQ(srbf::sinc(x), srbf::sinc(-x));
    EXPECT_LE(std::abs(srbf::sinc(x)), 1.0);
  }
  EXPECT_EQ(srbf::sinc(1e-9), srbf::sinc(-1e-9));
}

TEST(HermitianBasis, OrthonormalAndRoundTrips) {
  const srbf::HermitianBasis basis(4);
  ASSERT_EQ(basis.size(), 16);
  for (int a = 0; a < basis.size(); ++a) {
    for (int b = 0; b < basis.size(); ++b) {
      const double ip = (basis.element(a).adjoint() * basis.element(b)).trace().real();
      EXPECT_NEAR(ip, a == b ? 1.0 : 0.0, 1e-15);
    }
  }
  srbf::Rng rng(13);
  const HermitianMatrix h = random_hermitian(4, rng);
  const srbf::RVector x = basis.to_coords(h.mat());
  EXPECT_LT((basis.to_matrix(x.data()) - h.mat()).norm(), 1e-14);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(x(i), h(i, i).real(), 1e-15);
}

}  // namespace
