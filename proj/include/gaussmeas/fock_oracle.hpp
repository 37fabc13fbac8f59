// Copyright 2026 The gaussmeas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Brute-force single-mode ground truth in the truncated number basis
// |0>, ..., |D-1>. Weyl operators are exponentials of the truncated
// generator -i x^T Omega R = -i (x1 P - x2 Q); nothing here uses the
// closed-form Gaussian formulas of the rest of the library.

#include <utility>

#include "gaussmeas/observables.hpp"

namespace gaussmeas::fock {

inline constexpr int kDefaultCutoff = 40;
inline constexpr double kTruncationWarning = 1e-3;

struct FockOperator {
  int cutoff = 0;
  CMatrix matrix;
};

struct LadderOps {
  CMatrix a, adag, q, p;
};

/// a|n> = sqrt(n)|n-1>, Q = (a^dag + a)/sqrt(2), P = i(a^dag - a)/sqrt(2).
inline LadderOps ladder_ops(int cutoff) {
  if (cutoff < 2) throw DimensionError("ladder_ops: cutoff must be >= 2");
  LadderOps ops;
  ops.a = CMatrix::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) ops.a(n - 1, n) = std::sqrt(static_cast<double>(n));
  ops.adag = ops.a.adjoint();
  const double r2 = std::sqrt(2.0);
  ops.q = (ops.adag + ops.a) / r2;
  ops.p = Complex(0.0, 1.0) * (ops.adag - ops.a) / r2;
  return ops;
}

/// Population in the top 10% of the basis; large values mean the cutoff is
/// too small for the operator.
inline double truncation_weight(const FockOperator& rho) {
  const int d = rho.cutoff;
  const int top = std::max(1, (d + 9) / 10);
  double w = 0.0;
  for (int n = d - top; n < d; ++n) w += std::abs(rho.matrix(n, n).real());
  return w;
}

inline ValidityReport validate_density(const FockOperator& rho, double tol = 1e-10) {
  if (rho.matrix.rows() != rho.cutoff || rho.matrix.cols() != rho.cutoff) {
    throw DimensionError("density matrix does not match its declared cutoff");
  }
  const double herm = detail::max_abs(CMatrix(rho.matrix - rho.matrix.adjoint()));
  const double lo = detail::hermitian_min_eigenvalue(rho.matrix);
  const double trace_err = std::abs(rho.matrix.trace() - Complex(1.0, 0.0));
  return {herm <= tol && lo >= -tol && trace_err <= tol, lo};
}

/// Exact exponential of the truncated Weyl generator. With
/// U = exp(i theta n) one has U^dag Q U = cos(theta) Q - sin(theta) P exactly
/// in the truncated space, so for x = -r (sin theta, cos theta)
///   W(x) = U^dag exp(-i r Q) U,
/// and only the real symmetric matrix Q needs diagonalising (once per cutoff).
class FockWeyl {
 public:
  explicit FockWeyl(int cutoff) : cutoff_(cutoff) {
    const LadderOps ops = ladder_ops(cutoff);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(ops.q.real());
    basis_ = eig.eigenvectors();
    spectrum_ = eig.eigenvalues();
    cbasis_ = detail::to_complex(basis_);
  }

  int cutoff() const noexcept { return cutoff_; }

  CMatrix matrix(const Vector& x) const {
    const auto [theta, r] = polar(x);
    CVector phase(cutoff_);
    CVector spectral(cutoff_);
    for (int n = 0; n < cutoff_; ++n) {
      phase(n) = std::polar(1.0, theta * n);
      spectral(n) = std::polar(1.0, -r * spectrum_(n));
    }
    const CMatrix core = cbasis_ * spectral.asDiagonal() * cbasis_.transpose();
    return phase.conjugate().asDiagonal() * core * phase.asDiagonal();
  }

  /// tr[rho W(x)] without forming W(x).
  Complex trace_with(const CMatrix& rho, const Vector& x) const {
    const auto [theta, r] = polar(x);
    CVector phase(cutoff_);
    for (int n = 0; n < cutoff_; ++n) phase(n) = std::polar(1.0, theta * n);
    const CMatrix y = phase.asDiagonal() * rho * phase.conjugate().asDiagonal();
    const CMatrix yo = y * cbasis_;
    Complex total = 0.0;
    for (int k = 0; k < cutoff_; ++k) {
      const Complex diag = (cbasis_.col(k).array() * yo.col(k).array()).sum();
      total += std::polar(1.0, -r * spectrum_(k)) * diag;
    }
    return total;
  }

 private:
  static std::pair<double, double> polar(const Vector& x) {
    if (x.size() != 2) throw DimensionError("Fock oracle is single-mode: x must be in R^2");
    return {std::atan2(-x(0), -x(1)), x.norm()};
  }

  int cutoff_;
  Matrix basis_;
  CMatrix cbasis_;
  Vector spectrum_;
};

inline FockOperator fock_weyl_matrix(const Vector& x, int cutoff = kDefaultCutoff) {
  return {cutoff, FockWeyl(cutoff).matrix(x)};
}

struct OracleValue {
  Complex value;
  double truncation_weight = 0.0;
  bool truncation_warning = false;
};

inline OracleValue oracle_weyl_transform(const FockOperator& rho, const Vector& x,
                                         const FockWeyl& weyl) {
  if (weyl.cutoff() != rho.cutoff) throw DimensionError("oracle: cutoff mismatch");
  OracleValue out;
  out.value = weyl.trace_with(rho.matrix, x);
  out.truncation_weight = truncation_weight(rho);
  out.truncation_warning = out.truncation_weight > kTruncationWarning;
  return out;
}

inline OracleValue oracle_weyl_transform(const FockOperator& rho, const Vector& x) {
  return oracle_weyl_transform(rho, x, FockWeyl(rho.cutoff));
}

/// tr[rho W(A0 p)] * exp(-p^T B0 p / 4 - i v0^T p) for a single-mode observable.
inline OracleValue oracle_pushforward_char(const GaussianObservable& obs, const FockOperator& rho,
                                           const Vector& p, const FockWeyl& weyl) {
  if (obs.n_modes() != 1) throw DimensionError("oracle_pushforward_char: single-mode only");
  OracleValue out = oracle_weyl_transform(rho, obs.a0() * p, weyl);
  out.value *= std::exp(Complex(-0.25 * p.dot(obs.b0() * p), -obs.v0().dot(p)));
  return out;
}

inline OracleValue oracle_pushforward_char(const GaussianObservable& obs, const FockOperator& rho,
                                           const Vector& p) {
  return oracle_pushforward_char(obs, rho, p, FockWeyl(rho.cutoff));
}

// State preparation.

inline FockOperator pure_state(const CVector& psi) {
  const int d = static_cast<int>(psi.size());
  return {d, psi * psi.adjoint()};
}

inline FockOperator number_state(int n, int cutoff = kDefaultCutoff) {
  if (n < 0 || n >= cutoff) throw DimensionError("number_state: n outside the truncated basis");
  CVector psi = CVector::Zero(cutoff);
  psi(n) = 1.0;
  return pure_state(psi);
}

inline FockOperator vacuum(int cutoff = kDefaultCutoff) { return number_state(0, cutoff); }

/// Coherent state with quadrature means m = (<Q>, <P>), alpha = (m1 + i m2)/sqrt(2),
/// from the Poisson amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!).
inline FockOperator coherent(const Vector& m, int cutoff = kDefaultCutoff) {
  const Complex alpha(m(0) / std::sqrt(2.0), m(1) / std::sqrt(2.0));
  CVector psi(cutoff);
  psi(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < cutoff; ++n) psi(n) = psi(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return pure_state(psi);
}

/// exp(r (a^2 - a^dag^2)/2)|0>, with V = diag(e^{-2r}, e^{2r}); amplitudes
/// c_{2k} = (-tanh r)^k sqrt((2k)!) / (2^k k! sqrt(cosh r)).
inline FockOperator squeezed_vacuum(double r, int cutoff = kDefaultCutoff) {
  CVector psi = CVector::Zero(cutoff);
  const double t = -std::tanh(r);
  double c = 1.0 / std::sqrt(std::cosh(r));
  for (int k = 0; 2 * k < cutoff; ++k) {
    if (k > 0) c *= t * std::sqrt((2.0 * k) * (2.0 * k - 1.0)) / (2.0 * k);
    psi(2 * k) = c;
  }
  return pure_state(psi);
}

namespace detail_fock {

/// exp(-i t H) for Hermitian H.
inline CMatrix exp_hermitian(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (h + h.adjoint()));
  CVector phases(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k) phases(k) = std::polar(1.0, -t * eig.eigenvalues()(k));
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace detail_fock

/// Fock representation of an arbitrary single-mode Gaussian state, built as
/// W(m) R(psi) S(r) rho_thermal S^dag R^dag W(m)^dag in a padded basis and then
/// cut to `cutoff`. V = R diag(nu e^{-2r}, nu e^{2r}) R^T with nu the
/// symplectic eigenvalue.
inline FockOperator gaussian_state(const GaussianState& state, int cutoff = kDefaultCutoff,
                                   int pad = 40) {
  if (state.n_modes() != 1) throw DimensionError("fock::gaussian_state: single-mode only");
  const int big = cutoff + pad;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(state.v());
  const double lo = eig.eigenvalues()(0), hi = eig.eigenvalues()(1);
  const double nu = std::sqrt(lo * hi);
  const double r = 0.25 * std::log(hi / lo);
  const Vector axis = eig.eigenvectors().col(0);
  const double psi = std::atan2(axis(1), axis(0));

  const double nbar = std::max(0.0, 0.5 * (nu - 1.0));
  CMatrix rho = CMatrix::Zero(big, big);
  {
    const double q = nbar / (nbar + 1.0);
    double w = 1.0 / (nbar + 1.0);
    for (int n = 0; n < big; ++n, w *= q) rho(n, n) = w;
  }
  const LadderOps ops = ladder_ops(big);
  if (r != 0.0) {
    // exp(r K) with K = (a^2 - a^dag^2)/2 anti-Hermitian: exp(-i r H), H = i K.
    const CMatrix k = 0.5 * (ops.a * ops.a - ops.adag * ops.adag);
    const CMatrix sq = detail_fock::exp_hermitian(Complex(0.0, 1.0) * k, r);
    rho = sq * rho * sq.adjoint();
  }
  {
    CVector phase(big);
    for (int n = 0; n < big; ++n) phase(n) = std::polar(1.0, psi * n);
    rho = phase.asDiagonal() * rho * phase.conjugate().asDiagonal();
  }
  if (state.m().norm() > 0.0) {
    const CMatrix w = FockWeyl(big).matrix(state.m());
    rho = w * rho * w.adjoint();
  }
  return {cutoff, rho.topLeftCorner(cutoff, cutoff)};
}

/// First moments and anticommutator covariance computed from the truncated
/// quadrature matrices.
inline std::pair<Vector, Matrix> moments(const FockOperator& rho) {
  const LadderOps ops = ladder_ops(rho.cutoff);
  const CMatrix r[2] = {ops.q, ops.p};
  Vector m(2);
  Matrix v(2, 2);
  for (int i = 0; i < 2; ++i) m(i) = (rho.matrix * r[i]).trace().real();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      v(i, j) = (rho.matrix * (r[i] * r[j] + r[j] * r[i])).trace().real() - 2.0 * m(i) * m(j);
    }
  }
  return {m, v};
}

}  // namespace gaussmeas::fock
