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

#ifndef SRBF_NUMERICS_HPP
#define SRBF_NUMERICS_HPP

#include "srbf/types.hpp"

#include <vector>

namespace srbf {

/// Complex Hermitian matrix. Construction checks the Hermitian property
/// (|A_ij - conj(A_ji)| <= 1e-12 * max(1, max|A|)) and stores the exactly
/// symmetrized average, so every instance is Hermitian to machine precision.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  /// Throws Error(not_hermitian) when `a` is not square or not Hermitian.
  explicit HermitianMatrix(const CMatrix& a);

  static HermitianMatrix zero(int dim);
  static HermitianMatrix identity(int dim);
  static HermitianMatrix diagonal(const RVector& d);
  /// x * x^H for a column vector x.
  static HermitianMatrix outer(const CVector& x);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const CMatrix& mat() const noexcept { return m_; }
  cdouble operator()(int i, int j) const { return m_(i, j); }

  double trace() const { return m_.trace().real(); }
  double frobenius_norm() const { return m_.norm(); }

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator*(double s) const;

 private:
  CMatrix m_;
};

/// Eigen-decomposition in ascending eigenvalue order.
struct HermitianEig {
  RVector values;
  CMatrix vectors;  // columns
};

HermitianEig hermitian_eig(const HermitianMatrix& a);

/// Largest eigenvalue with its unit eigenvector. Phase convention: the first
/// component with modulus above 1e-12 is real and positive.
struct EigPair {
  double value = 0.0;
  CVector vector;
};

EigPair leading_eigpair(const HermitianMatrix& w);

double min_eigenvalue(const HermitianMatrix& a);
double spectral_norm(const HermitianMatrix& a);

/// Principal square root of a PSD matrix. Eigenvalues down to
/// -1e-9 * ||C||_2 are clipped to zero; anything more negative is an
/// Error(indefinite).
HermitianMatrix hermitian_sqrt(const HermitianMatrix& c);

/// Eigenvalue-clipping projection onto the PSD cone. The removed negative
/// mass (sum of |negative eigenvalues|) is written to `clipped_mass`.
HermitianMatrix project_psd(const HermitianMatrix& a, double* clipped_mass = nullptr);

/// Rotates `v` so that its first non-negligible component is real positive.
CVector canonical_phase(const CVector& v);

/// P(a, x) = gamma(a, x) / Gamma(a), by series for x < a + 1 and by a Lentz
/// continued fraction otherwise.
double regularized_lower_gamma(double a, double x);

/// Inverse CDF of the central chi-square law with `dof` degrees of freedom.
/// Throws Error(invalid_probability) for p outside [0, 1) and
/// Error(invalid_dof) for dof < 1.
double chi_square_inv_cdf(double p, int dof);

/// Unnormalized sinc, sin(x)/x, with the Taylor value near the origin.
double sinc(double x);

/// Orthonormal basis (under <A,B> = Re tr(A^H B)) of the real vector space of
/// dim x dim Hermitian matrices. Coordinate order: diagonal entries first,
/// then for each i < j the real-symmetric and imaginary-antisymmetric parts.
class HermitianBasis {
 public:
  explicit HermitianBasis(int dim);

  int dim() const noexcept { return dim_; }
  int size() const noexcept { return dim_ * dim_; }

  const CMatrix& element(int index) const { return elements_[static_cast<std::size_t>(index)]; }

  CMatrix to_matrix(const double* coords) const;
  RVector to_coords(const CMatrix& h) const;

  /// True for the basis elements with unit trace (the diagonal ones).
  bool is_diagonal(int index) const noexcept { return index < dim_; }

 private:
  int dim_;
  std::vector<CMatrix> elements_;
};

}  // namespace srbf

#endif  // SRBF_NUMERICS_HPP
