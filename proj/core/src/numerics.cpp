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

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace srbf {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kPsdClipTol = 1e-9;

double max_abs(const CMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

}  // namespace

HermitianMatrix::HermitianMatrix(const CMatrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::not_hermitian, "matrix is not square");
  }
  const double tol = kHermitianTol * std::max(1.0, max_abs(a));
  const CMatrix skew = a - a.adjoint();
  if (skew.size() > 0 && skew.cwiseAbs().maxCoeff() > 2.0 * tol) {
    throw Error(ErrorCode::not_hermitian, "asymmetry exceeds tolerance");
  }
  m_ = 0.5 * (a + a.adjoint());
}

HermitianMatrix HermitianMatrix::zero(int dim) {
  return HermitianMatrix(CMatrix::Zero(dim, dim));
}

HermitianMatrix HermitianMatrix::identity(int dim) {
  return HermitianMatrix(CMatrix::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::diagonal(const RVector& d) {
  return HermitianMatrix(CMatrix(d.cast<cdouble>().asDiagonal()));
}

HermitianMatrix HermitianMatrix::outer(const CVector& x) {
  return HermitianMatrix(CMatrix(x * x.adjoint()));
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  if (o.dim() != dim()) throw Error(ErrorCode::dimension_mismatch, "hermitian sum");
  return HermitianMatrix(CMatrix(m_ + o.m_));
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  if (o.dim() != dim()) throw Error(ErrorCode::dimension_mismatch, "hermitian difference");
  return HermitianMatrix(CMatrix(m_ - o.m_));
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
  return HermitianMatrix(CMatrix(m_ * s));
}

HermitianEig hermitian_eig(const HermitianMatrix& a) {
  if (a.dim() == 0) return {};
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.mat());
  return {es.eigenvalues(), es.eigenvectors()};
}

CVector canonical_phase(const CVector& v) {
  CVector out = v;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > 1e-12) {
      out *= std::conj(v(i)) / mag;
      out(i) = cdouble(std::abs(out(i)), 0.0);
      break;
    }
  }
  return out;
}

EigPair leading_eigpair(const HermitianMatrix& w) {
  if (w.dim() == 0) throw Error(ErrorCode::dimension_mismatch, "empty matrix");
  const HermitianEig eig = hermitian_eig(w);
  const Eigen::Index top = eig.values.size() - 1;
  return {eig.values(top), canonical_phase(eig.vectors.col(top))};
}

double min_eigenvalue(const HermitianMatrix& a) {
  if (a.dim() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double spectral_norm(const HermitianMatrix& a) {
  if (a.dim() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.mat(), Eigen::EigenvaluesOnly);
  return std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(a.dim() - 1)));
}

HermitianMatrix hermitian_sqrt(const HermitianMatrix& c) {
  if (c.dim() == 0) return c;
  const HermitianEig eig = hermitian_eig(c);
  const double norm = std::max(std::abs(eig.values(0)), std::abs(eig.values(c.dim() - 1)));
  if (eig.values(0) < -kPsdClipTol * norm) {
    throw Error(ErrorCode::indefinite, "eigenvalue " + std::to_string(eig.values(0)) +
                                           " below clipping threshold");
  }
  const RVector root = eig.values.cwiseMax(0.0).cwiseSqrt();
  return HermitianMatrix(CMatrix(eig.vectors * root.cast<cdouble>().asDiagonal() *
                                 eig.vectors.adjoint()));
}

HermitianMatrix project_psd(const HermitianMatrix& a, double* clipped_mass) {
  if (a.dim() == 0) {
    if (clipped_mass) *clipped_mass = 0.0;
    return a;
  }
  const HermitianEig eig = hermitian_eig(a);
  double removed = 0.0;
  RVector clipped = eig.values;
  for (Eigen::Index i = 0; i < clipped.size(); ++i) {
    if (clipped(i) < 0.0) {
      removed -= clipped(i);
      clipped(i) = 0.0;
    }
  }
  if (clipped_mass) *clipped_mass = removed;
  if (removed == 0.0) return a;
  return HermitianMatrix(CMatrix(eig.vectors * clipped.cast<cdouble>().asDiagonal() *
                                 eig.vectors.adjoint()));
}

double regularized_lower_gamma(double a, double x) {
  if (!(a > 0.0)) throw Error(ErrorCode::invalid_dof, "shape must be positive");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;

  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  const double log_prefactor = a * std::log(x) - x - std::lgamma(a);

  if (x < a + 1.0) {
    // sum_{n>=0} x^n / (a (a+1) ... (a+n))
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxIter; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return std::min(1.0, sum * std::exp(log_prefactor));
  }

  // Upper tail Q(a, x) via modified Lentz on the standard continued fraction.
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::max(0.0, 1.0 - std::exp(log_prefactor) * h);
}

double chi_square_inv_cdf(double p, int dof) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw Error(ErrorCode::invalid_probability, "p must lie in [0, 1)");
  }
  if (dof < 1) throw Error(ErrorCode::invalid_dof, "dof must be >= 1");
  if (p == 0.0) return 0.0;

  const double k = 0.5 * dof;
  auto cdf = [&](double x) { return regularized_lower_gamma(k, 0.5 * x); };

  // Bracket the root.
  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(dof));
  while (cdf(hi) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) break;
  }

  // Safeguarded Newton: fall back to bisection whenever the Newton iterate
  // leaves the bracket.
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = cdf(x) - p;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double log_pdf = (k - 1.0) * std::log(x) - 0.5 * x - k * std::numbers::ln2 - std::lgamma(k);
    const double pdf = std::exp(log_pdf);
    double next = (pdf > 0.0 && std::isfinite(pdf)) ? x - f / pdf : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-14 * std::max(1.0, x) || hi - lo <= 1e-14 * std::max(1.0, x)) {
      return next;
    }
    x = next;
  }
  return x;
}

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

HermitianBasis::HermitianBasis(int dim) : dim_(dim) {
  if (dim < 0) throw Error(ErrorCode::dimension_mismatch, "negative basis dimension");
  elements_.reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    CMatrix e = CMatrix::Zero(dim, dim);
    e(i, i) = 1.0;
    elements_.push_back(std::move(e));
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      CMatrix re = CMatrix::Zero(dim, dim);
      re(i, j) = r;
      re(j, i) = r;
      elements_.push_back(std::move(re));
      CMatrix im = CMatrix::Zero(dim, dim);
      im(i, j) = cdouble(0.0, r);
      im(j, i) = cdouble(0.0, -r);
      elements_.push_back(std::move(im));
    }
  }
}

CMatrix HermitianBasis::to_matrix(const double* coords) const {
  CMatrix out = CMatrix::Zero(dim_, dim_);
  const double r = 1.0 / std::sqrt(2.0);
  int idx = 0;
  for (int i = 0; i < dim_; ++i) out(i, i) = coords[idx++];
  for (int i = 0; i < dim_; ++i) {
    for (int j = i + 1; j < dim_; ++j) {
      const cdouble v(r * coords[idx], r * coords[idx + 1]);
      out(i, j) = v;
      out(j, i) = std::conj(v);
      idx += 2;
    }
  }
  return out;
}

RVector HermitianBasis::to_coords(const CMatrix& h) const {
  if (h.rows() != dim_ || h.cols() != dim_) {
    throw Error(ErrorCode::dimension_mismatch, "basis coordinates");
  }
  RVector out(size());
  const double s = std::sqrt(2.0);
  int idx = 0;
  for (int i = 0; i < dim_; ++i) out(idx++) = h(i, i).real();
  for (int i = 0; i < dim_; ++i) {
    for (int j = i + 1; j < dim_; ++j) {
      const cdouble v = 0.5 * (h(i, j) + std::conj(h(j, i)));
      out(idx++) = s * v.real();
      out(idx++) = s * v.imag();
    }
  }
  return out;
}

}  // namespace srbf
