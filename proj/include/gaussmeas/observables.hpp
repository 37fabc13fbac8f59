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

// Gaussian observables E on R^M for an N-mode field, characterised by
//
//   E^(p) = W(A0 p) exp(-1/4 p^T B0 p - i v0^T p),
//   B0 - i A0^T Omega_N A0 >= 0.
//
// Odd outcome dimensions are allowed; the outcome space need not be a
// symplectic space (this differs from e.g. Holevo's definition).

#include <cstdint>
#include <random>

#include "gaussmeas/states.hpp"

namespace gaussmeas {

class GaussianObservable {
 public:
  GaussianObservable(Matrix a0, Matrix b0, Vector v0)
      : a0_(std::move(a0)), b0_(std::move(b0)), v0_(std::move(v0)) {
    const Eigen::Index m = a0_.cols();
    if (a0_.rows() == 0 || a0_.rows() % 2 != 0 || m == 0) {
      throw DimensionError("observable: A0 must be 2N x M with N, M >= 1, got " +
                           detail::dims(a0_.rows(), a0_.cols()));
    }
    if (b0_.rows() != m || b0_.cols() != m || v0_.size() != m) {
      throw DimensionError("observable: B0 must be MxM and v0 of size M (M = " +
                           std::to_string(m) + ")");
    }
  }

  int n_modes() const noexcept { return static_cast<int>(a0_.rows() / 2); }
  int outcome_dim() const noexcept { return static_cast<int>(a0_.cols()); }
  const Matrix& a0() const noexcept { return a0_; }
  const Matrix& b0() const noexcept { return b0_; }
  const Vector& v0() const noexcept { return v0_; }

 private:
  Matrix a0_;
  Matrix b0_;
  Vector v0_;
};

/// Normal law with characteristic function exp(i mean^T p - 1/2 p^T cov p).
/// In the (C, d) parametrisation exp(-1/4 p^T C p - i d^T p) this is
/// C = 2 cov, d = -mean.
struct GaussianDistribution {
  Vector mean;
  Matrix cov;

  Complex characteristic(const Vector& p) const {
    return std::exp(Complex(-0.5 * p.dot(cov * p), mean.dot(p)));
  }
};

/// Q-function observable (-Omega_N, I, 0): covariant, on the PSD boundary.
inline GaussianObservable q_function(int n_modes) {
  const int d = 2 * n_modes;
  return {-omega(n_modes).matrix(), Matrix::Identity(d, d), Vector::Zero(d)};
}

/// Covariant Gaussian observable (-Omega_N, b0, v0).
inline GaussianObservable covariant_observable(const Matrix& b0, const Vector& v0) {
  return {-omega_for_dim(b0.rows()), b0, v0};
}

/// Sharp generalized quadrature with direction a in R^{2N}: the spectral
/// measure of -a^T Omega R = sum_j (a_{2j} Q_j - a_{2j-1} P_j).
inline GaussianObservable generalized_quadrature(const Vector& a, double noise = 0.0) {
  Matrix a0 = a;
  return {a0, Matrix::Constant(1, 1, noise), Vector::Zero(1)};
}

/// Q_theta = cos(theta) Q + sin(theta) P.
inline GaussianObservable rotated_quadrature(double theta, double noise = 0.0) {
  Vector a(2);
  a << -std::sin(theta), std::cos(theta);
  return generalized_quadrature(a, noise);
}

/// Q_{r,theta} = e^r cos(theta) Q + e^{-r} sin(theta) P.
inline GaussianObservable squeezed_quadrature(double theta, double r, double noise = 0.0) {
  Vector a(2);
  a << -std::exp(-r) * std::sin(theta), std::exp(r) * std::cos(theta);
  return generalized_quadrature(a, noise);
}

/// Checks B0 - i A0^T Omega A0 >= 0, plus symmetry of B0.
inline ValidityReport validate_observable(const GaussianObservable& obs,
                                          double tol = kDefaultTol) {
  if (!detail::is_symmetric(obs.b0(), tol)) return {false, 0.0};
  const Matrix om = omega(obs.n_modes()).matrix();
  const CMatrix test = detail::to_complex(obs.b0()) -
                       Complex(0.0, 1.0) *
                           detail::to_complex(obs.a0().transpose() * om * obs.a0());
  return psd_report(test, tol);
}

inline void require_valid(const GaussianObservable& obs, double tol, const char* where) {
  const auto report = validate_observable(obs, tol);
  if (!report.valid) {
    throw InvalidInputError(std::string(where) +
                            ": observable violates B0 - i A0^T Omega A0 >= 0 (min eigenvalue " +
                            std::to_string(report.min_eigenvalue) + ")");
  }
}

/// Outcome law of obs in the given state. Matching
///   rho^(A0 p) e^{-p^T B0 p / 4 - i v0^T p} = e^{i mu^T p - p^T Sigma p / 2}
/// term by term gives Sigma = (G^T V G + B0)/2 with G = Omega A0 and
/// mu = -(A0^T Omega m + v0).
inline GaussianDistribution pushforward(const GaussianObservable& obs,
                                        const GaussianState& state) {
  if (obs.n_modes() != state.n_modes()) {
    throw DimensionError("pushforward: observable acts on " + std::to_string(obs.n_modes()) +
                         " modes, state has " + std::to_string(state.n_modes()));
  }
  const Matrix om = omega(obs.n_modes()).matrix();
  const Matrix g = om * obs.a0();
  GaussianDistribution out;
  out.cov = detail::symmetric_part(0.5 * (g.transpose() * state.v() * g + obs.b0()));
  out.mean = -(obs.a0().transpose() * om * state.m() + obs.v0());
  return out;
}

/// Characteristic function of the outcome law, evaluated directly from the
/// defining product rho^(A0 p) * exp(-p^T B0 p / 4 - i v0^T p).
inline Complex pushforward_characteristic(const GaussianObservable& obs,
                                          const GaussianState& state, const Vector& p) {
  const Complex gauss = std::exp(Complex(-0.25 * p.dot(obs.b0() * p), -obs.v0().dot(p)));
  return weyl_transform(state, obs.a0() * p) * gauss;
}

struct Classification {
  bool commutative = false;
  bool sharp = false;
  bool covariant = false;
  bool informationally_complete = false;

  bool operator==(const Classification&) const = default;
};

inline bool is_informationally_complete(const GaussianObservable& obs,
                                        double tol = kDefaultTol) {
  return detail::numerical_rank(obs.a0(), tol) == 2 * obs.n_modes();
}

inline Classification classify(const GaussianObservable& obs, double tol = kDefaultTol) {
  const Matrix om = omega(obs.n_modes()).matrix();
  Classification c;
  c.commutative = detail::max_abs(obs.a0().transpose() * om * obs.a0()) <= tol;
  c.sharp = c.commutative && detail::max_abs(obs.b0()) <= tol;
  c.covariant = obs.outcome_dim() == 2 * obs.n_modes() &&
                detail::max_abs(obs.a0() + om) <= tol;
  c.informationally_complete = is_informationally_complete(obs, tol);
  return c;
}

/// Pushforward of outcomes through p: (A0 P^T, P B0 P^T, P v0).
inline GaussianObservable linear_postprocess(const GaussianObservable& obs, const Matrix& p) {
  if (p.cols() != obs.outcome_dim() || p.rows() == 0) {
    throw DimensionError("linear_postprocess: P must be M' x " +
                         std::to_string(obs.outcome_dim()) + ", got " +
                         detail::dims(p.rows(), p.cols()));
  }
  return {obs.a0() * p.transpose(), p * obs.b0() * p.transpose(), p * obs.v0()};
}

/// Convolution with the Gaussian measure mu^(p) = exp(-1/4 p^T C p - i d^T p):
/// (A0, B0 + C, v0 + d). Singular C is allowed.
inline GaussianObservable smear(const GaussianObservable& obs, const Matrix& c, const Vector& d,
                                double tol = kDefaultTol) {
  const Eigen::Index m = obs.outcome_dim();
  if (c.rows() != m || c.cols() != m || d.size() != m) {
    throw DimensionError("smear: noise must be " + detail::dims(m, m) + " with d of size " +
                         std::to_string(m));
  }
  if (!detail::is_symmetric(c, tol) || !psd_check(c, tol)) {
    throw InvalidNoiseError("smear: noise covariance C must be symmetric positive semidefinite");
  }
  return {obs.a0(), obs.b0() + c, obs.v0() + d};
}

/// Direction a = A0 P^T of the generalized quadrature smeared by the marginal
/// obs_P, for a 1 x 2N row p.
inline Vector marginal_direction(const GaussianObservable& obs, const Matrix& p) {
  if (obs.outcome_dim() != 2 * obs.n_modes()) {
    throw DimensionError("marginal_direction: needs a phase-space observable (M = 2N)");
  }
  if (p.rows() != 1 || p.cols() != obs.outcome_dim()) {
    throw DimensionError("marginal_direction: P must be 1 x 2N");
  }
  return obs.a0() * p.transpose();
}

/// Change of canonical coordinates by symplectic s on a phase-space
/// observable: (s A0 s^T, s B0 s^T, s v0). Leaves A0 = -Omega invariant.
inline GaussianObservable canonical_transform(const GaussianObservable& obs, const Matrix& s,
                                              double tol = kDefaultTol) {
  if (obs.outcome_dim() != 2 * obs.n_modes() || s.rows() != obs.outcome_dim() ||
      s.cols() != obs.outcome_dim()) {
    throw DimensionError("canonical_transform: needs M = 2N and s of size 2N x 2N");
  }
  if (!is_symplectic(s, tol * std::max(1.0, detail::max_abs(s) * detail::max_abs(s)))) {
    throw InvalidInputError("canonical_transform: s is not symplectic");
  }
  return {s * obs.a0() * s.transpose(), s * obs.b0() * s.transpose(), s * obs.v0()};
}

/// E = (S^{-1}(mu * E^Q))_P: P invertible, S symplectic with
/// S B0cov S^T = diag(beta_k I2), mu Gaussian with C = diag((beta_k - 1) I2)
/// and d = S P^{-1} v0.
struct CovariantDecomposition {
  Matrix p;
  Matrix s;
  Matrix noise_c;
  Vector noise_d;
  std::vector<double> betas;
};

inline CovariantDecomposition decompose_covariant(const GaussianObservable& obs,
                                                  double tol = kDefaultTol) {
  const int n = obs.n_modes();
  if (obs.outcome_dim() != 2 * n || !is_informationally_complete(obs, tol)) {
    throw NotInformationallyCompleteError(
        "decompose_covariant: needs an informationally complete observable with M = 2N");
  }
  const Matrix om = omega(n).matrix();
  CovariantDecomposition out;
  out.p = -obs.a0().transpose() * om;
  const Eigen::PartialPivLU<Matrix> lu(out.p);
  const Matrix p_inv = lu.inverse();
  const Matrix b_cov = detail::symmetric_part(p_inv * obs.b0() * p_inv.transpose());
  const Vector v_cov = p_inv * obs.v0();

  WilliamsonResult w;
  try {
    w = williamson(b_cov, tol);
  } catch (const DecompositionError&) {
    throw ConsistencyError("decompose_covariant: covariant noise matrix is not positive definite");
  }
  out.s = std::move(w.s);
  out.betas = std::move(w.betas);
  out.noise_c = Matrix::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    if (out.betas[k] < 1.0 - tol) {
      throw ConsistencyError("decompose_covariant: symplectic eigenvalue " +
                             std::to_string(out.betas[k]) + " < 1 violates positivity");
    }
    const double excess = std::max(0.0, out.betas[k] - 1.0);
    out.noise_c(2 * k, 2 * k) = out.noise_c(2 * k + 1, 2 * k + 1) = excess;
  }
  out.noise_d = out.s * v_cov;
  return out;
}

/// Rebuilds the observable from its parts, at parameter level only.
inline GaussianObservable recompose(const CovariantDecomposition& dec) {
  const Eigen::Index dim = dec.s.rows();
  const int n = static_cast<int>(dim / 2);
  const GaussianObservable smeared{-omega(n).matrix(), Matrix::Identity(dim, dim) + dec.noise_c,
                                   dec.noise_d};
  const Matrix s_inv = symplectic_inverse(dec.s);
  const GaussianObservable covariant{-omega(n).matrix(),
                                     s_inv * smeared.b0() * s_inv.transpose(),
                                     s_inv * smeared.v0()};
  return linear_postprocess(covariant, dec.p);
}

// Sampling from a GaussianDistribution.

/// n draws, one per row, using mt19937_64 seeded with `seed`. Handles
/// singular covariances through a symmetric square root.
inline Matrix sample_outcomes(const GaussianDistribution& dist, std::size_t n,
                              std::uint64_t seed) {
  const Eigen::Index m = dist.mean.size();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(detail::symmetric_part(dist.cov));
  const Vector root_vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix root = eig.eigenvectors() * root_vals.asDiagonal();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(static_cast<Eigen::Index>(n), m);
  Vector z(m);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < m; ++j) z(j) = normal(rng);
    out.row(i) = (dist.mean + root * z).transpose();
  }
  return out;
}

/// Sample mean and unbiased sample covariance.
inline GaussianDistribution empirical_distribution(const Matrix& samples) {
  if (samples.rows() < 2) {
    throw InvalidInputError("empirical_distribution: need at least two samples");
  }
  GaussianDistribution out;
  out.mean = samples.colwise().mean().transpose();
  const Matrix centered = samples.rowwise() - out.mean.transpose();
  out.cov = (centered.transpose() * centered) / static_cast<double>(samples.rows() - 1);
  return out;
}

}  // namespace gaussmeas
