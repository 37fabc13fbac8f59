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

// Symplectic linear algebra on the phase space R^{2N} with canonical
// coordinates ordered (q_1, p_1, ..., q_N, p_N).

#include <numeric>
#include <vector>

#include "gaussmeas/core.hpp"

namespace gaussmeas {

/// The standard symplectic form Omega_N = blockdiag(w, ..., w) with
/// w = [[0, 1], [-1, 0]].
class SymplecticForm {
 public:
  explicit SymplecticForm(int n_modes) : n_modes_(n_modes) {
    if (n_modes < 1) {
      throw DimensionError("symplectic form needs n_modes >= 1, got " +
                           std::to_string(n_modes));
    }
    matrix_ = Matrix::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
      matrix_(2 * k, 2 * k + 1) = 1.0;
      matrix_(2 * k + 1, 2 * k) = -1.0;
    }
  }

  int n_modes() const noexcept { return n_modes_; }
  int dim() const noexcept { return 2 * n_modes_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  operator const Matrix&() const noexcept { return matrix_; }

 private:
  int n_modes_;
  Matrix matrix_;
};

inline SymplecticForm omega(int n_modes) { return SymplecticForm(n_modes); }

/// Omega of the right size for a 2N-dimensional phase-space object.
inline Matrix omega_for_dim(Eigen::Index dim) {
  if (dim % 2 != 0 || dim < 2) {
    throw DimensionError("phase-space dimension must be even and positive, got " +
                         std::to_string(dim));
  }
  return omega(static_cast<int>(dim / 2)).matrix();
}

/// True iff ||S^T Omega S - Omega||_max <= tol.
inline bool is_symplectic(const Matrix& s, double tol = kDefaultTol) {
  detail::require_square(s, "symplectic candidate");
  const Matrix om = omega_for_dim(s.rows());
  return detail::max_abs(s.transpose() * om * s - om) <= tol;
}

/// True iff the Hermitian part of m has minimum eigenvalue >= -tol.
inline bool psd_check(const CMatrix& m, double tol = kDefaultTol) {
  detail::require_square(m, "psd_check input");
  return detail::hermitian_min_eigenvalue(m) >= -tol;
}

inline bool psd_check(const Matrix& m, double tol = kDefaultTol) {
  return psd_check(detail::to_complex(m), tol);
}

/// PSD verdict together with the minimum eigenvalue of the Hermitian part.
inline ValidityReport psd_report(const CMatrix& m, double tol = kDefaultTol) {
  detail::require_square(m, "psd_check input");
  const double lo = detail::hermitian_min_eigenvalue(m);
  return {lo >= -tol, lo};
}

/// S^{-1} = -Omega S^T Omega for symplectic S.
inline Matrix symplectic_inverse(const Matrix& s) {
  const Matrix om = omega_for_dim(s.rows());
  return -om * s.transpose() * om;
}

struct WilliamsonResult {
  Matrix s;                   // symplectic, S B S^T = diag(beta_1 I2, ...)
  std::vector<double> betas;  // symplectic eigenvalues, descending
};

/// Williamson normal form of a real symmetric positive-definite 2N x 2N
/// matrix b: returns symplectic S with S b S^T = blockdiag(beta_k I_2).
///
/// Let A = b^{-1/2} Omega b^{-1/2}. The Hermitian matrix iA has spectrum
/// {+-1/beta_k}; an eigenvector u = x + iy for +a gives A x = a y and
/// A y = -a x, so the real vectors sqrt(2) y, sqrt(2) x span a 2x2 block
/// [[0, a], [-a, 0]] of an orthogonal O^T A O. Then S = D^{1/2} O^T b^{-1/2}.
inline WilliamsonResult williamson(const Matrix& b, double tol = kDefaultTol) {
  detail::require_square(b, "williamson input");
  omega_for_dim(b.rows());
  if (!detail::is_symmetric(b, tol)) {
    throw InvalidInputError("williamson: matrix is not symmetric within tolerance");
  }
  const Eigen::Index dim = b.rows();
  const int n = static_cast<int>(dim / 2);
  const Matrix bs = detail::symmetric_part(b);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(bs);
  const double scale = std::max(1.0, detail::max_abs(bs));
  if (eig.eigenvalues().minCoeff() <= tol * scale) {
    throw DecompositionError("williamson: matrix is not positive definite (min eigenvalue " +
                             std::to_string(eig.eigenvalues().minCoeff()) + ")");
  }
  const Matrix inv_sqrt = eig.operatorInverseSqrt();
  Matrix a = inv_sqrt * omega(n).matrix() * inv_sqrt;
  a = 0.5 * (a - a.transpose());
  const CMatrix ia = Complex(0.0, 1.0) * detail::to_complex(a);

  Eigen::SelfAdjointEigenSolver<CMatrix> herm(ia);
  // Eigenvalues ascend; the last n are the positive ones a_k = 1/beta_k in
  // ascending order, i.e. beta descending.
  Matrix o(dim, dim);
  Vector d_sqrt(dim);
  std::vector<double> betas(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::Index col = n + k;
    const double ak = herm.eigenvalues()(col);
    if (ak <= 0.0) {
      throw DecompositionError("williamson: degenerate symplectic spectrum");
    }
    const CVector u = herm.eigenvectors().col(col);
    o.col(2 * k) = std::sqrt(2.0) * u.imag();
    o.col(2 * k + 1) = std::sqrt(2.0) * u.real();
    betas[k] = 1.0 / ak;
    d_sqrt(2 * k) = d_sqrt(2 * k + 1) = std::sqrt(betas[k]);
  }
  WilliamsonResult out;
  out.s = d_sqrt.asDiagonal() * o.transpose() * inv_sqrt;
  out.betas = std::move(betas);
  return out;
}

/// Symplectic eigenvalues of b, descending.
inline std::vector<double> symplectic_eigenvalues(const Matrix& b,
                                                  double tol = kDefaultTol) {
  return williamson(b, tol).betas;
}

// Elementary symplectic maps acting on chosen modes of an N-mode phase space.

inline Matrix symplectic_rotation(int n_modes, int mode, double angle) {
  Matrix s = Matrix::Identity(2 * n_modes, 2 * n_modes);
  const double c = std::cos(angle), sn = std::sin(angle);
  s(2 * mode, 2 * mode) = c;
  s(2 * mode, 2 * mode + 1) = sn;
  s(2 * mode + 1, 2 * mode) = -sn;
  s(2 * mode + 1, 2 * mode + 1) = c;
  return s;
}

inline Matrix symplectic_squeezer(int n_modes, int mode, double r) {
  Matrix s = Matrix::Identity(2 * n_modes, 2 * n_modes);
  s(2 * mode, 2 * mode) = std::exp(r);
  s(2 * mode + 1, 2 * mode + 1) = std::exp(-r);
  return s;
}

/// Beam splitter mixing modes i and j with transmissivity cos^2(angle).
inline Matrix symplectic_beam_splitter(int n_modes, int i, int j, double angle) {
  Matrix s = Matrix::Identity(2 * n_modes, 2 * n_modes);
  const double c = std::cos(angle), sn = std::sin(angle);
  for (int k = 0; k < 2; ++k) {
    s(2 * i + k, 2 * i + k) = c;
    s(2 * i + k, 2 * j + k) = sn;
    s(2 * j + k, 2 * i + k) = -sn;
    s(2 * j + k, 2 * j + k) = c;
  }
  return s;
}

}  // namespace gaussmeas
