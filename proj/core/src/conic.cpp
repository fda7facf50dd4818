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

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace srbf {

// ---------------------------------------------------------------- program

int ConicProgram::add_variables(int count) {
  if (count < 0) throw Error(ErrorCode::dimension_mismatch, "negative variable count");
  const int first = variables();
  objective_.conservativeResize(first + count);
  objective_.tail(count).setZero();
  return first;
}

void ConicProgram::set_objective(int var, double coef) {
  if (var < 0 || var >= variables()) throw Error(ErrorCode::dimension_mismatch, "objective var");
  objective_(var) = coef;
}

int ConicProgram::add_psd(PsdConstraint con) {
  if (con.constant.size() == 0) con.constant = CMatrix::Zero(con.dim, con.dim);
  psd_.push_back(std::move(con));
  return static_cast<int>(psd_.size()) - 1;
}

int ConicProgram::add_soc(SocConstraint con) {
  if (con.constant.size() == 0) con.constant = RVector::Zero(con.dim);
  soc_.push_back(std::move(con));
  return static_cast<int>(soc_.size()) - 1;
}

void ConicProgram::add_nonnegative(int var) {
  add_linear_geq(0.0, {{var, 1.0}});
}

void ConicProgram::add_linear_geq(double constant, const std::vector<std::pair<int, double>>& coefs) {
  PsdConstraint con;
  con.dim = 1;
  con.constant = CMatrix::Constant(1, 1, constant);
  for (const auto& [var, a] : coefs) con.terms.emplace_back(var, CMatrix::Constant(1, 1, a));
  add_psd(std::move(con));
}

void ConicProgram::check() const {
  const int n = variables();
  auto bad = [](const std::string& what) { throw Error(ErrorCode::dimension_mismatch, what); };
  if (!objective_.allFinite()) bad("objective is not finite");
  for (const auto& con : psd_) {
    if (con.dim < 1 || con.constant.rows() != con.dim || con.constant.cols() != con.dim) {
      bad("psd constant shape");
    }
    if (!con.constant.allFinite()) bad("psd constant is not finite");
    if ((con.constant - con.constant.adjoint()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, con.constant.cwiseAbs().maxCoeff())) {
      bad("psd constant is not Hermitian");
    }
    for (const auto& [var, F] : con.terms) {
      if (var < 0 || var >= n) bad("psd term variable index");
      if (F.rows() != con.dim || F.cols() != con.dim || !F.allFinite()) bad("psd term shape");
      if ((F - F.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, F.cwiseAbs().maxCoeff())) {
        bad("psd coefficient is not Hermitian");
      }
    }
  }
  for (const auto& con : soc_) {
    if (con.dim < 1 || con.constant.size() != con.dim || !con.constant.allFinite()) {
      bad("soc constant shape");
    }
    for (const auto& [var, g] : con.terms) {
      if (var < 0 || var >= n) bad("soc term variable index");
      if (g.size() != con.dim || !g.allFinite()) bad("soc term shape");
    }
  }
}

const char* to_string(ConicStatus s) noexcept {
  switch (s) {
    case ConicStatus::optimal: return "optimal";
    case ConicStatus::infeasible: return "infeasible";
    case ConicStatus::unbounded: return "unbounded";
    case ConicStatus::inaccurate: return "inaccurate";
  }
  return "unknown";
}

// ---------------------------------------------------------------- solver

namespace {

// Element of the product cone: one Hermitian matrix per PSD block and one
// real vector per second-order cone.
struct ConeVec {
  std::vector<CMatrix> p;
  std::vector<RVector> q;
};

double herm_dot(const CMatrix& a, const CMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

double dot(const ConeVec& a, const ConeVec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.p.size(); ++i) s += herm_dot(a.p[i], b.p[i]);
  for (std::size_t i = 0; i < a.q.size(); ++i) s += a.q[i].dot(b.q[i]);
  return s;
}

double norm(const ConeVec& a) { return std::sqrt(dot(a, a)); }

// y += a * x
void axpy(double a, const ConeVec& x, ConeVec& y) {
  for (std::size_t i = 0; i < x.p.size(); ++i) y.p[i] += a * x.p[i];
  for (std::size_t i = 0; i < x.q.size(); ++i) y.q[i] += a * x.q[i];
}

ConeVec lincomb(double a, const ConeVec& x, double b, const ConeVec& y) {
  ConeVec out = x;
  for (std::size_t i = 0; i < x.p.size(); ++i) out.p[i] = a * x.p[i] + b * y.p[i];
  for (std::size_t i = 0; i < x.q.size(); ++i) out.q[i] = a * x.q[i] + b * y.q[i];
  return out;
}

double soc_det(const RVector& u) {
  const double r = u.tail(u.size() - 1).norm();
  return (u(0) - r) * (u(0) + r);
}

// Affine map x -> A(x) and its adjoint, with dense copies of the SOC data.
class Operator {
 public:
  explicit Operator(const ConicProgram& prog) : prog_(prog), n_(prog.variables()) {
    for (const auto& con : prog.soc()) {
      RMatrix G = RMatrix::Zero(con.dim, n_);
      for (const auto& [var, g] : con.terms) G.col(var) += g;
      soc_G_.push_back(std::move(G));
    }
  }

  int n() const { return n_; }

  ConeVec zero() const {
    ConeVec v;
    for (const auto& con : prog_.psd()) v.p.push_back(CMatrix::Zero(con.dim, con.dim));
    for (const auto& con : prog_.soc()) v.q.push_back(RVector::Zero(con.dim));
    return v;
  }

  ConeVec constant() const {
    ConeVec v;
    for (const auto& con : prog_.psd()) v.p.push_back(con.constant);
    for (const auto& con : prog_.soc()) v.q.push_back(con.constant);
    return v;
  }

  ConeVec identity() const {
    ConeVec v;
    for (const auto& con : prog_.psd()) v.p.push_back(CMatrix::Identity(con.dim, con.dim));
    for (const auto& con : prog_.soc()) {
      RVector e = RVector::Zero(con.dim);
      e(0) = 1.0;
      v.q.push_back(std::move(e));
    }
    return v;
  }

  ConeVec apply(const RVector& x) const {
    ConeVec v = zero();
    for (std::size_t b = 0; b < prog_.psd().size(); ++b) {
      for (const auto& [var, F] : prog_.psd()[b].terms) v.p[b] += x(var) * F;
    }
    for (std::size_t b = 0; b < soc_G_.size(); ++b) v.q[b] = soc_G_[b] * x;
    return v;
  }

  RVector adjoint(const ConeVec& z) const {
    RVector out = RVector::Zero(n_);
    for (std::size_t b = 0; b < prog_.psd().size(); ++b) {
      for (const auto& [var, F] : prog_.psd()[b].terms) out(var) += herm_dot(F, z.p[b]);
    }
    for (std::size_t b = 0; b < soc_G_.size(); ++b) out += soc_G_[b].transpose() * z.q[b];
    return out;
  }

  const ConicProgram& prog() const { return prog_; }
  const RMatrix& soc_G(std::size_t b) const { return soc_G_[b]; }

 private:
  const ConicProgram& prog_;
  int n_;
  std::vector<RMatrix> soc_G_;
};

// Nesterov-Todd scaling W with W z = W^{-T} s = lambda.
struct Scaling {
  // PSD: W(Z) = R^H Z R, W^{-T}(S) = R^{-1} S R^{-H}, lambda = diag(sv).
  std::vector<CMatrix> R, Rinv;
  std::vector<RVector> lam_p;
  // SOC: W = beta (2 v v^T - J), symmetric.
  std::vector<double> beta;
  std::vector<RVector> v;
  std::vector<RVector> lam_q;
};

RMatrix soc_W(double beta, const RVector& v) {
  const Eigen::Index m = v.size();
  RMatrix J = RMatrix::Identity(m, m);
  J.bottomRightCorner(m - 1, m - 1) *= -1.0;
  return beta * (2.0 * v * v.transpose() - J);
}

RMatrix soc_Winv(double beta, const RVector& v) {
  const Eigen::Index m = v.size();
  RVector Jv = v;
  Jv.tail(m - 1) *= -1.0;
  RMatrix J = RMatrix::Identity(m, m);
  J.bottomRightCorner(m - 1, m - 1) *= -1.0;
  return (2.0 * Jv * Jv.transpose() - J) / beta;
}

// NT scaling of one PSD pair: s = R diag(lam) R^H, z = R^{-H} diag(lam) R^{-1}.
bool psd_nt(const CMatrix& s, const CMatrix& z, CMatrix& R, CMatrix& Rinv, RVector& lam) {
  Eigen::LLT<CMatrix> ls(s);
  Eigen::LLT<CMatrix> lz(z);
  if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
  const CMatrix Ls = ls.matrixL();
  const CMatrix Lz = lz.matrixL();
  Eigen::JacobiSVD<CMatrix> svd(Lz.adjoint() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
  lam = svd.singularValues();
  if (lam.minCoeff() <= 0.0) return false;
  R = Ls * svd.matrixV() * lam.cwiseSqrt().cwiseInverse().cast<cdouble>().asDiagonal();
  Rinv = lam.cwiseSqrt().cast<cdouble>().asDiagonal() * svd.matrixV().adjoint() *
         Ls.triangularView<Eigen::Lower>().solve(CMatrix::Identity(Ls.rows(), Ls.cols()));
  return true;
}

bool soc_nt(const RVector& sb, const RVector& zb, double& beta, RVector& v, RVector& lam) {
  const double sJs = soc_det(sb);
  const double zJz = soc_det(zb);
  if (!(sJs > 0.0 && zJz > 0.0 && sb(0) > 0.0 && zb(0) > 0.0)) return false;
  const RVector sbar = sb / std::sqrt(sJs);
  const RVector zbar = zb / std::sqrt(zJz);
  const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
  RVector Jz = zbar;
  Jz.tail(Jz.size() - 1) *= -1.0;
  const RVector wbar = (sbar + Jz) / (2.0 * gamma);
  v = wbar;
  v(0) += 1.0;
  v /= std::sqrt(2.0 * (wbar(0) + 1.0));
  beta = std::pow(sJs / zJz, 0.25);
  lam = soc_W(beta, v) * zb;
  return true;
}

bool compute_scaling(const ConeVec& s, const ConeVec& z, Scaling& W) {
  W = Scaling{};
  const std::size_t np = s.p.size();
  const std::size_t nq = s.q.size();
  W.R.resize(np);
  W.Rinv.resize(np);
  W.lam_p.resize(np);
  W.beta.resize(nq);
  W.v.resize(nq);
  W.lam_q.resize(nq);
  for (std::size_t b = 0; b < np; ++b) {
    if (!psd_nt(s.p[b], z.p[b], W.R[b], W.Rinv[b], W.lam_p[b])) return false;
  }
  for (std::size_t b = 0; b < nq; ++b) {
    if (!soc_nt(s.q[b], z.q[b], W.beta[b], W.v[b], W.lam_q[b])) return false;
  }
  return true;
}

// Moves the scaling to the iterate whose scaled coordinates are (st, zt).
// PSD blocks compose the old scaling with the NT scaling of (st, zt), which
// is well conditioned near the central path; SOC blocks are recomputed from
// the unscaled iterate (s, z).
bool update_scaling(Scaling& W, const ConeVec& st, const ConeVec& zt, const ConeVec& s,
                    const ConeVec& z) {
  for (std::size_t b = 0; b < st.p.size(); ++b) {
    CMatrix R, Rinv;
    RVector lam;
    if (!psd_nt(st.p[b], zt.p[b], R, Rinv, lam)) return false;
    W.R[b] = W.R[b] * R;
    W.Rinv[b] = Rinv * W.Rinv[b];
    W.lam_p[b] = lam;
  }
  for (std::size_t b = 0; b < s.q.size(); ++b) {
    if (!soc_nt(s.q[b], z.q[b], W.beta[b], W.v[b], W.lam_q[b])) return false;
  }
  return true;
}

ConeVec apply_W(const Scaling& W, const ConeVec& z) {
  ConeVec out = z;
  for (std::size_t b = 0; b < z.p.size(); ++b) out.p[b] = W.R[b].adjoint() * z.p[b] * W.R[b];
  for (std::size_t b = 0; b < z.q.size(); ++b) out.q[b] = soc_W(W.beta[b], W.v[b]) * z.q[b];
  return out;
}

ConeVec apply_WT(const Scaling& W, const ConeVec& y) {
  ConeVec out = y;
  for (std::size_t b = 0; b < y.p.size(); ++b) out.p[b] = W.R[b] * y.p[b] * W.R[b].adjoint();
  for (std::size_t b = 0; b < y.q.size(); ++b) out.q[b] = soc_W(W.beta[b], W.v[b]) * y.q[b];
  return out;
}

// (W^T W)^{-1} y
ConeVec apply_WtW_inv(const Scaling& W, const ConeVec& y) {
  ConeVec out = y;
  for (std::size_t b = 0; b < y.p.size(); ++b) {
    const CMatrix P = W.Rinv[b].adjoint() * W.Rinv[b];
    out.p[b] = P * y.p[b] * P;
  }
  for (std::size_t b = 0; b < y.q.size(); ++b) {
    const RMatrix Wi = soc_Winv(W.beta[b], W.v[b]);
    out.q[b] = Wi * (Wi * y.q[b]);
  }
  return out;
}

// Scaled-space helpers where lambda is diagonal (PSD) or a cone vector (SOC).
ConeVec lambda_vec(const Scaling& W) {
  ConeVec out;
  for (const auto& l : W.lam_p) out.p.push_back(l.cast<cdouble>().asDiagonal());
  out.q = W.lam_q;
  return out;
}

ConeVec jordan(const ConeVec& a, const ConeVec& b) {
  ConeVec out = a;
  for (std::size_t i = 0; i < a.p.size(); ++i) {
    const CMatrix ab = a.p[i] * b.p[i];
    out.p[i] = 0.5 * (ab + ab.adjoint());
  }
  for (std::size_t i = 0; i < a.q.size(); ++i) {
    const RVector& u = a.q[i];
    const RVector& v = b.q[i];
    const Eigen::Index m = u.size();
    RVector r(m);
    r(0) = u.dot(v);
    r.tail(m - 1) = u(0) * v.tail(m - 1) + v(0) * u.tail(m - 1);
    out.q[i] = r;
  }
  return out;
}

// Solves lambda o u = v for u.
ConeVec jordan_solve(const Scaling& W, const ConeVec& v) {
  ConeVec out = v;
  for (std::size_t i = 0; i < v.p.size(); ++i) {
    const RVector& l = W.lam_p[i];
    CMatrix u = v.p[i];
    for (Eigen::Index a = 0; a < u.rows(); ++a) {
      for (Eigen::Index b = 0; b < u.cols(); ++b) u(a, b) *= 2.0 / (l(a) + l(b));
    }
    out.p[i] = u;
  }
  for (std::size_t i = 0; i < v.q.size(); ++i) {
    const RVector& l = W.lam_q[i];
    const RVector& x = v.q[i];
    const Eigen::Index m = l.size();
    RVector u(m);
    u(0) = (l(0) * x(0) - l.tail(m - 1).dot(x.tail(m - 1))) / soc_det(l);
    u.tail(m - 1) = (x.tail(m - 1) - u(0) * l.tail(m - 1)) / l(0);
    out.q[i] = u;
  }
  return out;
}

// Largest step a in [0, inf) with lambda + a * d in the cone.
double max_step(const Scaling& W, const ConeVec& d) {
  double amax = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.p.size(); ++i) {
    const RVector isq = W.lam_p[i].cwiseSqrt().cwiseInverse();
    const CMatrix M = isq.cast<cdouble>().asDiagonal() * d.p[i] * isq.cast<cdouble>().asDiagonal();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (M + M.adjoint()), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin < 0.0) amax = std::min(amax, -1.0 / lmin);
  }
  for (std::size_t i = 0; i < d.q.size(); ++i) {
    const RVector& l = W.lam_q[i];
    const RVector& x = d.q[i];
    const Eigen::Index m = l.size();
    // (l0 + a x0)^2 - ||l1 + a x1||^2 = qa a^2 + qb a + qc, with qc > 0
    const double qa = soc_det(x);
    const double qb = 2.0 * (l(0) * x(0) - l.tail(m - 1).dot(x.tail(m - 1)));
    const double qc = soc_det(l);
    double first = std::numeric_limits<double>::infinity();
    if (x(0) < 0.0) first = -l(0) / x(0);
    if (std::abs(qa) < 1e-300) {
      if (qb < 0.0) first = std::min(first, -qc / qb);
    } else {
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        // numerically stable roots
        const double t = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
        const double r1 = t / qa;
        const double r2 = (t != 0.0) ? qc / t : std::numeric_limits<double>::infinity();
        if (r1 > 0.0) first = std::min(first, r1);
        if (r2 > 0.0) first = std::min(first, r2);
      }
    }
    amax = std::min(amax, first);
  }
  return amax;
}

double min_cone_eig(const ConeVec& s) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& P : s.p) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (P + P.adjoint()), Eigen::EigenvaluesOnly);
    worst = std::min(worst, es.eigenvalues()(0));
  }
  for (const auto& q : s.q) worst = std::min(worst, q(0) - q.tail(q.size() - 1).norm());
  return worst;
}

constexpr int kMaxBacktracks = 40;
// Iterations without halving the merit before giving up.
constexpr int kStallIters = 5;
constexpr double kStallMerit = 1e4;

bool strictly_interior(const ConeVec& v) {
  for (const auto& P : v.p) {
    Eigen::LLT<CMatrix> llt(P);
    if (llt.info() != Eigen::Success) return false;
  }
  for (const auto& q : v.q) {
    if (!(q(0) > 0.0 && soc_det(q) > 0.0)) return false;
  }
  return true;
}

// Dense normal matrix A^* (W^T W)^{-1} A.
RMatrix schur(const Operator& op, const Scaling* W) {
  const int n = op.n();
  RMatrix H = RMatrix::Zero(n, n);
  const auto& psd = op.prog().psd();
  for (std::size_t b = 0; b < psd.size(); ++b) {
    const auto& terms = psd[b].terms;
    std::vector<CMatrix> T;
    T.reserve(terms.size());
    for (const auto& [var, F] : terms) {
      T.push_back(W ? CMatrix(W->Rinv[b] * F * W->Rinv[b].adjoint()) : F);
    }
    for (std::size_t a = 0; a < terms.size(); ++a) {
      for (std::size_t c = a; c < terms.size(); ++c) {
        const double h = herm_dot(T[a], T[c]);
        H(terms[a].first, terms[c].first) += h;
        if (a != c) H(terms[c].first, terms[a].first) += h;
      }
    }
  }
  for (std::size_t b = 0; b < op.prog().soc().size(); ++b) {
    const RMatrix& G = op.soc_G(b);
    const RMatrix WG = W ? RMatrix(soc_Winv(W->beta[b], W->v[b]) * G) : G;
    H.noalias() += WG.transpose() * WG;
  }
  return H;
}

class NormalSolver {
 public:
  explicit NormalSolver(const RMatrix& H) {
    llt_.compute(H);
    ok_ = llt_.info() == Eigen::Success;
    if (!ok_) {
      const double shift = 1e-13 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
      ldlt_.compute(H + shift * RMatrix::Identity(H.rows(), H.cols()));
    }
  }
  RVector solve(const RVector& b) const { return ok_ ? RVector(llt_.solve(b)) : RVector(ldlt_.solve(b)); }

 private:
  Eigen::LLT<RMatrix> llt_;
  Eigen::LDLT<RMatrix> ldlt_;
  bool ok_ = false;
};

struct Reduced {
  RVector dx;
  ConeVec dz;
};

constexpr int kRefineSteps = 3;

// Solves -A^*(dz) = bx, -A(dx) - W^T W dz = bz, with iterative refinement.
Reduced reduced_solve(const Operator& op, const Scaling& W, const NormalSolver& ns,
                      const RVector& bx, const ConeVec& bz) {
  auto once = [&](const RVector& rx, const ConeVec& rz) {
    Reduced r;
    r.dx = ns.solve(rx - op.adjoint(apply_WtW_inv(W, rz)));
    ConeVec t = rz;
    axpy(1.0, op.apply(r.dx), t);
    r.dz = apply_WtW_inv(W, t);
    for (auto& P : r.dz.p) P *= -1.0;
    for (auto& q : r.dz.q) q *= -1.0;
    return r;
  };
  Reduced r = once(bx, bz);
  const double scale = std::max(1.0, std::max(bx.norm(), norm(bz)));
  for (int pass = 0; pass < kRefineSteps; ++pass) {
    // residuals of the reduced system
    const RVector ex = bx + op.adjoint(r.dz);
    ConeVec ez = bz;
    axpy(1.0, op.apply(r.dx), ez);
    axpy(1.0, apply_WT(W, apply_W(W, r.dz)), ez);
    if (std::max(ex.norm(), norm(ez)) <= 1e-15 * scale) break;
    const Reduced c = once(ex, ez);
    r.dx += c.dx;
    axpy(1.0, c.dz, r.dz);
  }
  return r;
}

}  // namespace

ConicSolution conic_solve(const ConicProgram& prog, const ConicSolverParams& params) {
  prog.check();
  const Operator op(prog);
  const RVector& c = prog.objective();
  const ConeVec F0 = op.constant();
  const ConeVec e = op.identity();

  int nu = 0;
  for (const auto& con : prog.psd()) nu += con.dim;
  nu += static_cast<int>(prog.soc().size());

  const double resx0 = std::max(1.0, c.norm());
  const double resz0 = std::max(1.0, norm(F0));

  ConicSolution sol;

  // Starting point: least-squares primal slack and minimum-norm dual.
  const NormalSolver ns0(schur(op, nullptr));
  RVector x = -ns0.solve(op.adjoint(F0));
  ConeVec s = F0;
  axpy(1.0, op.apply(x), s);
  ConeVec z = op.apply(ns0.solve(c));
  {
    const double nrms = norm(s);
    const double ts = -min_cone_eig(s);
    if (ts >= -1e-8 * std::max(nrms, 1.0)) axpy(1.0 + ts, e, s);
    const double nrmz = norm(z);
    const double tz = -min_cone_eig(z);
    if (tz >= -1e-8 * std::max(nrmz, 1.0)) axpy(1.0 + tz, e, z);
  }
  double tau = 1.0;
  double kappa = 1.0;

  // Best iterate so far, returned when the method stalls short of tolerance.
  struct Snapshot {
    RVector x;
    ConeVec s, z;
    double tau = 1.0, kappa = 1.0;
    double merit = std::numeric_limits<double>::infinity();
    double pcost = 0.0, dcost = 0.0, pres = 0.0, dres = 0.0, gap = 0.0;
  } best;
  int since_best = 0;

  Scaling W;
  bool have_scaling = false;
  bool converged = false;
  for (int iter = 0; iter <= params.max_iters; ++iter) {
    sol.iterations = iter;

    const RVector Atz = op.adjoint(z);
    const ConeVec Ax = op.apply(x);
    const RVector rx = c * tau - Atz;
    ConeVec rz = s;
    axpy(-1.0, Ax, rz);
    axpy(-tau, F0, rz);
    const double cx = c.dot(x);
    const double hz = dot(F0, z);
    const double rt = kappa + cx + hz;
    const double gap = dot(s, z);

    const double pcost = cx / tau;
    const double dcost = -hz / tau;
    // Residuals relative to the size of the terms that produce them.
    const double pres =
        norm(rz) / tau / std::max({resz0, norm(Ax) / tau, norm(s) / tau});
    const double dres = rx.norm() / tau / std::max(resx0, Atz.norm() / tau);
    const double relgap = std::min(gap / (tau * tau), std::abs(pcost - dcost)) /
                          std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));

    double pinf = std::numeric_limits<double>::infinity();
    if (hz < 0.0) pinf = Atz.norm() / (-hz) / resx0;
    double dinf = std::numeric_limits<double>::infinity();
    if (cx < 0.0) {
      ConeVec t = s;
      axpy(-1.0, Ax, t);
      dinf = norm(t) / (-cx) / resz0;
    }

    if (params.verbose) {
      std::fprintf(stderr, "%3d pcost % .8e dcost % .8e pres %.2e dres %.2e gap %.2e k/t %.2e\n",
                   iter, pcost, dcost, pres, dres, relgap, kappa / tau);
    }

    sol.primal_objective = pcost;
    sol.dual_objective = dcost;
    sol.primal_residual = pres;
    sol.dual_residual = dres;
    sol.gap = gap / (tau * tau);

    const double merit =
        std::max({pres / params.feastol, dres / params.feastol, relgap / params.gap_tol});
    if (merit < 0.5 * best.merit) since_best = 0;
    if (merit < best.merit) {
      best = Snapshot{x, s, z, tau, kappa, merit, pcost, dcost, pres, dres, sol.gap};
    }

    if (pres <= params.feastol && dres <= params.feastol && relgap <= params.gap_tol) {
      sol.status = ConicStatus::optimal;
      converged = true;
      break;
    }
    if (pinf <= params.feastol) {
      sol.status = ConicStatus::infeasible;
      converged = true;
      break;
    }
    if (dinf <= params.feastol) {
      sol.status = ConicStatus::unbounded;
      converged = true;
      break;
    }
    // Stall exit only once the iterate is already nearly optimal.
    if (iter == params.max_iters || (++since_best > kStallIters && best.merit < kStallMerit)) break;

    if (!have_scaling && !compute_scaling(s, z, W)) break;
    const NormalSolver ns(schur(op, &W));

    const Reduced k1 = reduced_solve(op, W, ns, -c, F0);
    const double denom = -kappa / tau + c.dot(k1.dx) + dot(F0, k1.dz);
    const ConeVec lam = lambda_vec(W);
    const ConeVec lam2 = jordan(lam, lam);
    const double mu = (gap + tau * kappa) / (nu + 1);

    struct Step {
      RVector dx;
      ConeVec dz, ds, dzt, dst;
      double dtau, dkappa;
    };
    auto direction = [&](double eta, const ConeVec& bs, double rtk) {
      const ConeVec v = jordan_solve(W, bs);
      ConeVec bz0 = rz;
      for (auto& P : bz0.p) P *= -eta;
      for (auto& q : bz0.q) q *= -eta;
      axpy(-1.0, apply_WT(W, v), bz0);
      const Reduced k2 = reduced_solve(op, W, ns, -eta * rx, bz0);
      Step st;
      st.dtau = (-eta * rt - rtk / tau - c.dot(k2.dx) - dot(F0, k2.dz)) / denom;
      st.dx = k2.dx + st.dtau * k1.dx;
      st.dz = k2.dz;
      axpy(st.dtau, k1.dz, st.dz);
      st.dzt = apply_W(W, st.dz);
      st.dst = lincomb(1.0, v, -1.0, st.dzt);
      st.ds = apply_WT(W, st.dst);
      st.dkappa = (rtk - kappa * st.dtau) / tau;
      return st;
    };
    auto step_length = [&](const Step& st) {
      double a = std::min(max_step(W, st.dst), max_step(W, st.dzt));
      if (st.dtau < 0.0) a = std::min(a, -tau / st.dtau);
      if (st.dkappa < 0.0) a = std::min(a, -kappa / st.dkappa);
      return a;
    };

    // predictor
    ConeVec bs = lam2;
    for (auto& P : bs.p) P *= -1.0;
    for (auto& q : bs.q) q *= -1.0;
    const Step aff = direction(1.0, bs, -tau * kappa);
    const double a_aff = std::min(1.0, step_length(aff));
    const double sigma = std::pow(1.0 - a_aff, 3);

    // corrector
    bs = lam2;
    for (auto& P : bs.p) P *= -1.0;
    for (auto& q : bs.q) q *= -1.0;
    axpy(sigma * mu, e, bs);
    axpy(-1.0, jordan(aff.dst, aff.dzt), bs);
    const double rtk = -tau * kappa + sigma * mu - aff.dtau * aff.dkappa;
    const Step st = direction(1.0 - sigma, bs, rtk);
    double alpha = std::min(1.0, 0.99 * step_length(st));

    // Check the step in scaled coordinates, backing off if rounding puts the
    // new point on the cone boundary. s and z are updated directly; rebuilding
    // them through an ill-conditioned W loses the dual residual.
    ConeVec s_sc, z_sc;
    for (int tries = 0;; ++tries) {
      s_sc = lincomb(1.0, lam, alpha, st.dst);
      z_sc = lincomb(1.0, lam, alpha, st.dzt);
      if (strictly_interior(s_sc) && strictly_interior(z_sc)) break;
      if (tries == kMaxBacktracks) {
        alpha = 0.0;
        break;
      }
      alpha *= 0.8;
    }
    if (alpha == 0.0) break;

    x += alpha * st.dx;
    axpy(alpha, st.ds, s);
    axpy(alpha, st.dz, z);
    tau += alpha * st.dtau;
    kappa += alpha * st.dkappa;
    if (!(tau > 0.0 && kappa > 0.0) || !x.allFinite()) break;
    have_scaling = update_scaling(W, s_sc, z_sc, s, z);
  }
  if (!converged) {
    sol.status = ConicStatus::inaccurate;
    if (best.merit < std::numeric_limits<double>::infinity()) {
      x = best.x;
      s = best.s;
      z = best.z;
      tau = best.tau;
      kappa = best.kappa;
      sol.primal_objective = best.pcost;
      sol.dual_objective = best.dcost;
      sol.primal_residual = best.pres;
      sol.dual_residual = best.dres;
      sol.gap = best.gap;
    }
  }

  // Report in the original (non-homogeneous) scale.
  const double scale = (sol.status == ConicStatus::infeasible)  ? -dot(F0, z)
                       : (sol.status == ConicStatus::unbounded) ? -c.dot(x)
                                                                : tau;
  sol.x = x / scale;
  ConeVec slack = F0;
  axpy(1.0, op.apply(sol.x), slack);
  sol.psd_slack = slack.p;
  sol.soc_slack = slack.q;
  for (const auto& P : z.p) sol.psd_dual.push_back(P / scale);
  for (const auto& q : z.q) sol.soc_dual.push_back(q / scale);
  sol.cone_violation = std::max(0.0, -min_cone_eig(slack));
  return sol;
}

}  // namespace srbf
