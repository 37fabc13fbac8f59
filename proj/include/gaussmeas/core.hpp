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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace gaussmeas {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Default tolerance for every boundary-sensitive test (PSD checks, ranks,
/// symplecticity). The Q-function sits exactly on the positivity boundary.
inline constexpr double kDefaultTol = 1e-9;

// Error hierarchy. Every library failure derives from gaussmeas::Error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& message) : Error(message) {}
};

class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& message) : Error(message) {}
};

class InvalidStateError : public Error {
 public:
  InvalidStateError(const std::string& message, double min_eigenvalue)
      : Error(message), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

class DecompositionError : public Error {
 public:
  explicit DecompositionError(const std::string& message) : Error(message) {}
};

class NotInformationallyCompleteError : public Error {
 public:
  explicit NotInformationallyCompleteError(const std::string& message)
      : Error(message) {}
};

class InvalidNoiseError : public Error {
 public:
  explicit InvalidNoiseError(const std::string& message) : Error(message) {}
};

class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(const std::string& message) : Error(message) {}
};

/// Outcome of a positivity-type validity test. `min_eigenvalue` is the
/// smallest eigenvalue of the Hermitian matrix that was tested.
struct ValidityReport {
  bool valid = false;
  double min_eigenvalue = 0.0;
  explicit operator bool() const noexcept { return valid; }
};

namespace detail {

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : static_cast<double>(m.cwiseAbs().maxCoeff());
}

inline std::string dims(Eigen::Index rows, Eigen::Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

inline void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + " must be square, got " +
                         dims(m.rows(), m.cols()));
  }
}

inline void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + " must be square, got " +
                         dims(m.rows(), m.cols()));
  }
}

inline bool is_symmetric(const Matrix& m, double tol) {
  return m.rows() == m.cols() &&
         max_abs(m - m.transpose()) <= tol * std::max(1.0, max_abs(m));
}

inline Matrix symmetric_part(const Matrix& m) {
  return 0.5 * (m + m.transpose());
}

/// Minimum eigenvalue of the Hermitian part (m + m^dagger)/2.
inline double hermitian_min_eigenvalue(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

/// Singular values at or below tol * (largest singular value) count as zero.
inline int numerical_rank(const Matrix& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol * s(0)) ++rank;
  }
  return rank;
}

inline CMatrix to_complex(const Matrix& m) { return m.cast<Complex>(); }

}  // namespace detail
}  // namespace gaussmeas
