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

// Gaussian states of N bosonic modes.
//
// Conventions used throughout the library:
//   * covariance V_ij = tr[rho {R_i - m_i, R_j - m_j}] (anticommutator), so the
//     vacuum has V = I and the uncertainty relation reads V + i Omega >= 0;
//   * Weyl transform rho^(x) = tr[rho W(x)], W(x) = exp(-i x^T Omega R);
//   * Fourier transforms carry e^{+i y^T x}.

#include "gaussmeas/symplectic.hpp"

namespace gaussmeas {

/// Gaussian state (m, V). Construction validates the uncertainty relation.
class GaussianState {
 public:
  GaussianState(Vector m, Matrix v, double tol = kDefaultTol)
      : m_(std::move(m)), v_(std::move(v)) {
    const Eigen::Index dim = v_.rows();
    if (v_.cols() != dim || dim == 0 || dim % 2 != 0 || m_.size() != dim) {
      throw DimensionError("state needs m in R^{2N} and V 2Nx2N, got m of size " +
                           std::to_string(m_.size()) + " and V " +
                           detail::dims(v_.rows(), v_.cols()));
    }
    if (!detail::is_symmetric(v_, tol)) {
      throw InvalidStateError("covariance matrix is not symmetric", 0.0);
    }
    v_ = detail::symmetric_part(v_);
    const CMatrix test = detail::to_complex(v_) +
                         Complex(0.0, 1.0) * detail::to_complex(omega_for_dim(dim));
    const double lo = detail::hermitian_min_eigenvalue(test);
    if (lo < -tol) {
      throw InvalidStateError(
          "uncertainty relation V + i*Omega >= 0 violated (min eigenvalue " +
              std::to_string(lo) + ")",
          lo);
    }
  }

  static GaussianState vacuum(int n_modes) {
    return GaussianState(Vector::Zero(2 * n_modes), Matrix::Identity(2 * n_modes, 2 * n_modes));
  }

  /// Coherent state with displacement m (vacuum covariance).
  static GaussianState coherent(const Vector& m) {
    return GaussianState(m, Matrix::Identity(m.size(), m.size()));
  }

  /// Single-mode squeezed vacuum with V = diag(e^{-2r}, e^{2r}).
  static GaussianState squeezed(double r) {
    Matrix v = Matrix::Zero(2, 2);
    v(0, 0) = std::exp(-2.0 * r);
    v(1, 1) = std::exp(2.0 * r);
    return GaussianState(Vector::Zero(2), v);
  }

  int n_modes() const noexcept { return static_cast<int>(m_.size() / 2); }
  const Vector& m() const noexcept { return m_; }
  const Matrix& v() const noexcept { return v_; }

 private:
  Vector m_;
  Matrix v_;
};

inline GaussianState make_state(const Vector& m, const Matrix& v, double tol = kDefaultTol) {
  return GaussianState(m, v, tol);
}

/// rho^(x) = exp(-1/4 x^T (Omega^T V Omega) x - i (Omega m)^T x).
inline Complex weyl_transform(const GaussianState& state, const Vector& x) {
  if (x.size() != state.m().size()) {
    throw DimensionError("weyl_transform: argument has size " + std::to_string(x.size()) +
                         ", state lives in R^" + std::to_string(state.m().size()));
  }
  const Matrix om = omega(state.n_modes()).matrix();
  const Vector ox = om * x;  // (Omega x); x^T Omega^T V Omega x = ox^T V ox
  const double quad = 0.25 * ox.dot(state.v() * ox);
  const double lin = (om * state.m()).dot(x);
  return std::exp(Complex(-quad, -lin));
}

}  // namespace gaussmeas
