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

// Seeded random fixtures shared by the unit and acceptance suites.

#include <random>

#include "gaussmeas/gaussmeas.hpp"

namespace gaussmeas::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double normal() { return normal_(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Matrix matrix(Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = normal();
    return m;
  }
  Vector vector(Eigen::Index n) { return matrix(n, 1).col(0); }

  CMatrix hermitian(Eigen::Index n) {
    CMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(normal(), normal());
    return 0.5 * (m + m.adjoint());
  }

  /// Random positive-definite matrix with condition number kept moderate.
  Matrix positive_definite(Eigen::Index n) {
    const Matrix x = matrix(n, n);
    return x * x.transpose() + 0.5 * Matrix::Identity(n, n);
  }

  /// Product of random rotations, single-mode squeezers, beam splitters and
  /// Omega blocks.
  Matrix symplectic(int n_modes, int factors = 6) {
    Matrix s = Matrix::Identity(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < factors; ++k) {
      const int mode = integer(0, n_modes - 1);
      switch (integer(0, n_modes > 1 ? 3 : 2)) {
        case 0: s = s * symplectic_rotation(n_modes, mode, uniform(-3.0, 3.0)); break;
        case 1: s = s * symplectic_squeezer(n_modes, mode, uniform(-0.8, 0.8)); break;
        case 2: s = s * omega(n_modes).matrix(); break;
        default: {
          int other = integer(0, n_modes - 2);
          if (other >= mode) ++other;
          s = s * symplectic_beam_splitter(n_modes, mode, other, uniform(-3.0, 3.0));
        }
      }
    }
    return s;
  }

  /// V = S diag(nu_k I) S^T with nu_k >= 1: always a valid state.
  GaussianState state(int n_modes, double max_excess = 1.5) {
    const Matrix s = symplectic(n_modes);
    Vector d(2 * n_modes);
    for (int k = 0; k < n_modes; ++k) d(2 * k) = d(2 * k + 1) = 1.0 + uniform(0.0, max_excess);
    return GaussianState(vector(2 * n_modes), s * d.asDiagonal() * s.transpose());
  }

  /// |H| for Hermitian H = i K with K real antisymmetric, which is real
  /// symmetric and satisfies |H| - H >= 0 with equality on a subspace.
  static Matrix abs_of_i(const Matrix& k) {
    const CMatrix h = Complex(0.0, 1.0) * k.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
    const CMatrix a = eig.eigenvectors() * eig.eigenvalues().cwiseAbs().asDiagonal() *
                      eig.eigenvectors().adjoint();
    return 0.5 * (a.real() + a.real().transpose());
  }

  /// Random valid observable; with boundary = true B0 sits on the PSD
  /// boundary of B0 - i A0^T Omega A0 >= 0.
  GaussianObservable observable(int n_modes, int outcome_dim, bool boundary = false) {
    const Matrix a0 = matrix(2 * n_modes, outcome_dim);
    const Matrix k = a0.transpose() * omega(n_modes).matrix() * a0;
    Matrix b0 = abs_of_i(k);
    if (!boundary) {
      const Matrix w = matrix(outcome_dim, outcome_dim);
      b0 += 0.3 * w * w.transpose();
    }
    return {a0, b0, vector(outcome_dim)};
  }

  /// Valid commutative observable of rank one: A0 = a c^T.
  GaussianObservable rank_one_observable(int n_modes, int outcome_dim) {
    const Matrix a0 = vector(2 * n_modes) * vector(outcome_dim).transpose();
    const Matrix w = matrix(outcome_dim, outcome_dim);
    return {a0, w * w.transpose(), vector(outcome_dim)};
  }

  /// Random completely positive channel with real B = |i(A^T Omega A - Omega)|.
  GaussianChannel channel(int in_modes, int out_modes) {
    const Matrix a = 0.8 * matrix(2 * in_modes, 2 * out_modes);
    const Matrix k = a.transpose() * omega(in_modes).matrix() * a - omega(out_modes).matrix();
    Matrix b = abs_of_i(k);
    const Matrix w = matrix(2 * out_modes, 2 * out_modes);
    b += 0.2 * w * w.transpose();
    return GaussianChannel(a, b, vector(2 * out_modes));
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace gaussmeas::testing
