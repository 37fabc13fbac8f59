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

// Gaussian channels Phi: T(H^N) -> T(H^M) acting on Weyl transforms as
//
//   Phi(rho)^(x) = rho^(A x) exp(-1/4 x^T B x - i v^T x),   x in R^{2M},
//
// with complete positivity B + i Omega_M - i A^T Omega_N A >= 0.
//
// B is complex. Its imaginary part is antisymmetric and drops out of the
// quadratic form on real x, so only Re(B) enters the action on states, while
// the positivity test uses the full matrix. channel_from_observable relies on
// this: it sets B = B' - i Omega_M.

#include <optional>

#include "gaussmeas/observables.hpp"

namespace gaussmeas {

class GaussianChannel {
 public:
  GaussianChannel(Matrix a, CMatrix b, Vector v) : a_(std::move(a)), b_(std::move(b)), v_(std::move(v)) {
    if (a_.rows() == 0 || a_.cols() == 0 || a_.rows() % 2 != 0 || a_.cols() % 2 != 0) {
      throw DimensionError("channel: A must be 2N x 2M, got " + detail::dims(a_.rows(), a_.cols()));
    }
    if (b_.rows() != a_.cols() || b_.cols() != a_.cols() || v_.size() != a_.cols()) {
      throw DimensionError("channel: B must be 2M x 2M and v of size 2M (2M = " +
                           std::to_string(a_.cols()) + ")");
    }
  }

  GaussianChannel(Matrix a, const Matrix& b, Vector v)
      : GaussianChannel(std::move(a), detail::to_complex(b), std::move(v)) {}

  static GaussianChannel identity(int n_modes) {
    const int d = 2 * n_modes;
    return {Matrix::Identity(d, d), Matrix(Matrix::Zero(d, d)), Vector::Zero(d)};
  }

  /// Pure-loss channel with transmissivity eta: A = sqrt(eta) I, B = (1-eta) I.
  static GaussianChannel attenuator(int n_modes, double eta) {
    const int d = 2 * n_modes;
    return {std::sqrt(eta) * Matrix::Identity(d, d), Matrix((1.0 - eta) * Matrix::Identity(d, d)),
            Vector::Zero(d)};
  }

  int in_modes() const noexcept { return static_cast<int>(a_.rows() / 2); }
  int out_modes() const noexcept { return static_cast<int>(a_.cols() / 2); }
  const Matrix& a() const noexcept { return a_; }
  const CMatrix& b() const noexcept { return b_; }
  const Vector& v() const noexcept { return v_; }

  /// Symmetric real part of B, the matrix in the quadratic form.
  Matrix b_quadratic() const { return detail::symmetric_part(b_.real()); }

 private:
  Matrix a_;
  CMatrix b_;
  Vector v_;
};

inline ValidityReport validate_channel(const GaussianChannel& ch, double tol = kDefaultTol) {
  if (detail::max_abs(Matrix(ch.b().imag() + ch.b().imag().transpose())) > tol) {
    return {false, 0.0};
  }
  const Matrix om_in = omega(ch.in_modes()).matrix();
  const Matrix om_out = omega(ch.out_modes()).matrix();
  const Complex i(0.0, 1.0);
  const CMatrix test = ch.b() + i * detail::to_complex(om_out) -
                       i * detail::to_complex(ch.a().transpose() * om_in * ch.a());
  return psd_report(test, tol);
}

/// Output of Phi on a Gaussian state. Matching quadratic and linear terms of
/// rho^(A x) e^{-x^T B x/4 - i v^T x} against the output Weyl transform gives
///   Omega_M^T V' Omega_M = A^T Omega_N^T V Omega_N A + Re B,
///   Omega_M m' = A^T Omega_N m + v,
/// i.e. V' = Omega_M (...) Omega_M^T and m' = Omega_M^T (A^T Omega_N m + v).
inline GaussianState apply_channel(const GaussianChannel& ch, const GaussianState& state,
                                   double tol = kDefaultTol) {
  if (ch.in_modes() != state.n_modes()) {
    throw DimensionError("apply_channel: channel expects " + std::to_string(ch.in_modes()) +
                         " input modes, state has " + std::to_string(state.n_modes()));
  }
  const auto report = validate_channel(ch, tol);
  if (!report.valid) {
    throw InvalidInputError("apply_channel: channel violates complete positivity (min eigenvalue " +
                            std::to_string(report.min_eigenvalue) + ")");
  }
  const Matrix om_in = omega(ch.in_modes()).matrix();
  const Matrix om_out = omega(ch.out_modes()).matrix();
  const Matrix g = om_in * ch.a();
  const Matrix inner = g.transpose() * state.v() * g + ch.b_quadratic();
  const Matrix v_out = om_out * inner * om_out.transpose();
  const Vector m_out = om_out.transpose() * (ch.a().transpose() * om_in * state.m() + ch.v());
  return GaussianState(m_out, v_out, tol);
}

/// Sequential composition: `first` (N -> M) followed by `second` (M -> K).
/// Substituting Phi_1(rho)^(y) = rho^(A1 y) e^{...}(y) at y = A2 x into Phi_2
/// yields A = A1 A2, B = A2^T B1 A2 + B2, v = A2^T v1 + v2. Conjugating
/// the first positivity condition by A2 and adding the second shows that the
/// composite satisfies complete positivity.
inline GaussianChannel compose(const GaussianChannel& first, const GaussianChannel& second) {
  if (first.out_modes() != second.in_modes()) {
    throw DimensionError("compose: first channel outputs " + std::to_string(first.out_modes()) +
                         " modes, second expects " + std::to_string(second.in_modes()));
  }
  const CMatrix a2 = detail::to_complex(second.a());
  return {first.a() * second.a(), CMatrix(a2.transpose() * first.b() * a2 + second.b()),
          Vector(second.a().transpose() * first.v() + second.v())};
}

/// Homodyne detection of the output p-quadratures: (A0)_ij = A_{i,2j},
/// (B0)_ij = B_{2i,2j}, (v0)_i = v_{2i} (1-based indices), since
/// exp(i p^T Q) = W(p_0) with p_0 = (0, p_1, ..., 0, p_M).
inline GaussianObservable observable_from_channel(const GaussianChannel& ch) {
  const int n = ch.in_modes();
  const int m = ch.out_modes();
  Matrix a0(2 * n, m);
  Matrix b0(m, m);
  Vector v0(m);
  const Matrix b_re = ch.b().real();
  for (int j = 0; j < m; ++j) {
    a0.col(j) = ch.a().col(2 * j + 1);
    v0(j) = ch.v()(2 * j + 1);
    for (int i = 0; i < m; ++i) b0(i, j) = b_re(2 * i + 1, 2 * j + 1);
  }
  return {a0, detail::symmetric_part(b0), v0};
}

/// Converse construction: A_{i,2j} = (A0)_ij, B = B' - i Omega_M with
/// B'_{2i,2j} = (B0)_ij, v_{2i} = (v0)_i, all other entries zero. Complete
/// positivity then reduces to the observable's own positivity condition.
inline GaussianChannel channel_from_observable(const GaussianObservable& obs,
                                               double tol = kDefaultTol) {
  require_valid(obs, tol, "channel_from_observable");
  const int n = obs.n_modes();
  const int m = obs.outcome_dim();
  Matrix a = Matrix::Zero(2 * n, 2 * m);
  Matrix b_prime = Matrix::Zero(2 * m, 2 * m);
  Vector v = Vector::Zero(2 * m);
  for (int j = 0; j < m; ++j) {
    a.col(2 * j + 1) = obs.a0().col(j);
    v(2 * j + 1) = obs.v0()(j);
    for (int i = 0; i < m; ++i) b_prime(2 * i + 1, 2 * j + 1) = obs.b0()(i, j);
  }
  const CMatrix b = detail::to_complex(b_prime) -
                    Complex(0.0, 1.0) * detail::to_complex(omega(m).matrix());
  return {a, b, v};
}

/// System (N modes) coupled to an L-mode Gaussian ancilla by W(d) and U(S);
/// the first M output modes are kept, the remaining K = N + L - M traced out.
/// L = 0 (no ancilla) is allowed.
class DilationSpec {
 public:
  DilationSpec(Matrix s, Vector d, std::optional<GaussianState> ancilla, int kept_modes,
               double tol = kDefaultTol)
      : s_(std::move(s)), d_(std::move(d)), ancilla_(std::move(ancilla)), kept_modes_(kept_modes) {
    detail::require_square(s_, "dilation S");
    const Eigen::Index total = s_.rows();
    const Eigen::Index anc = 2 * ancilla_modes();
    if (total % 2 != 0 || total <= anc || d_.size() != total) {
      throw DimensionError("dilation: S must be 2(N+L) square with N >= 1 and d of matching size");
    }
    if (kept_modes_ < 1 || 2 * kept_modes_ > total) {
      throw DimensionError("dilation: kept modes M must satisfy 1 <= M <= N + L");
    }
    const double scale = std::max(1.0, detail::max_abs(s_) * detail::max_abs(s_));
    if (!is_symplectic(s_, tol * scale)) {
      throw InvalidInputError("dilation: S is not symplectic");
    }
  }

  const Matrix& s() const noexcept { return s_; }
  const Vector& d() const noexcept { return d_; }
  const std::optional<GaussianState>& ancilla() const noexcept { return ancilla_; }
  int kept_modes() const noexcept { return kept_modes_; }
  int ancilla_modes() const noexcept { return ancilla_ ? ancilla_->n_modes() : 0; }
  int system_modes() const noexcept {
    return static_cast<int>(s_.rows() / 2) - ancilla_modes();
  }

 private:
  Matrix s_;
  Vector d_;
  std::optional<GaussianState> ancilla_;
  int kept_modes_;
};

/// A = S11, B = S21^T Omega_L^T V Omega_L S21, v = S21^T Omega_L m - Omega_M dt,
/// where S11 (2N x 2M) and S21 (2L x 2M) are the blocks of the first 2M
/// columns of S, and dt holds the first 2M entries of d (the components that
/// pair with the kept modes in d^T Omega x').
inline GaussianChannel channel_from_dilation(const DilationSpec& spec,
                                             double tol = kDefaultTol) {
  const int n = spec.system_modes();
  const int l = spec.ancilla_modes();
  const int m = spec.kept_modes();
  const Matrix s11 = spec.s().block(0, 0, 2 * n, 2 * m);
  Matrix b = Matrix::Zero(2 * m, 2 * m);
  Vector v = -omega(m).matrix() * spec.d().head(2 * m);
  if (l > 0) {
    const Matrix s21 = spec.s().block(2 * n, 0, 2 * l, 2 * m);
    const Matrix om_l = omega(l).matrix();
    const Matrix g = om_l * s21;
    b = detail::symmetric_part(g.transpose() * spec.ancilla()->v() * g);
    v += s21.transpose() * om_l * spec.ancilla()->m();
  }
  GaussianChannel ch(s11, b, v);
  const auto report = validate_channel(ch, tol);
  if (!report.valid) {
    throw ConsistencyError("channel_from_dilation: result fails complete positivity (min eigenvalue " +
                           std::to_string(report.min_eigenvalue) + ")");
  }
  return ch;
}

}  // namespace gaussmeas
