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

// Informational completeness of sets of Gaussian observables.
//
// A set {E_j} is IC iff the union of the subspaces X_j = A0^j R^{M_j} is
// dense, which for a finite set means some A0^j already has rank 2N. For
// infinite one-parameter families density is not decidable from samples;
// direction_coverage reports a covering radius instead.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaussmeas/observables.hpp"

namespace gaussmeas {

/// Finite list of observables on a common number of modes.
class ObservableSet {
 public:
  ObservableSet() = default;
  explicit ObservableSet(std::vector<GaussianObservable> members) : members_(std::move(members)) {
    for (const auto& obs : members_) {
      if (obs.n_modes() != members_.front().n_modes()) {
        throw DimensionError("observable set: members act on different numbers of modes");
      }
    }
  }

  void add(GaussianObservable obs) {
    if (!members_.empty() && obs.n_modes() != n_modes()) {
      throw DimensionError("observable set: members act on different numbers of modes");
    }
    members_.push_back(std::move(obs));
  }

  bool empty() const noexcept { return members_.empty(); }
  std::size_t size() const noexcept { return members_.size(); }
  int n_modes() const {
    if (members_.empty()) throw InvalidInputError("observable set is empty");
    return members_.front().n_modes();
  }
  const std::vector<GaussianObservable>& members() const noexcept { return members_; }
  const GaussianObservable& operator[](std::size_t i) const { return members_.at(i); }

 private:
  std::vector<GaussianObservable> members_;
};

namespace detail {

inline void require_nonempty_valid(const ObservableSet& set, double tol, const char* where) {
  if (set.empty()) throw InvalidInputError(std::string(where) + ": observable set is empty");
  for (const auto& obs : set.members()) require_valid(obs, tol, where);
}

}  // namespace detail

inline bool ic_single(const GaussianObservable& obs, double tol = kDefaultTol) {
  return is_informationally_complete(obs, tol);
}

/// A finite union of proper subspaces is nowhere dense, so a finite set is IC
/// exactly when one member is.
inline bool ic_finite_set(const ObservableSet& set, double tol = kDefaultTol) {
  detail::require_nonempty_valid(set, tol, "ic_finite_set");
  return std::any_of(set.members().begin(), set.members().end(),
                     [tol](const GaussianObservable& obs) { return ic_single(obs, tol); });
}

struct SubspaceSpan {
  int dimension = 0;
  Matrix basis;  // 2N x dimension, orthonormal columns
};

/// Linear span of the union of the X_j (not the union itself).
inline SubspaceSpan subspace_union_span(const ObservableSet& set, double tol = kDefaultTol) {
  if (set.empty()) throw InvalidInputError("subspace_union_span: observable set is empty");
  const int dim = 2 * set.n_modes();
  Eigen::Index cols = 0;
  for (const auto& obs : set.members()) cols += obs.outcome_dim();
  Matrix stacked(dim, cols);
  Eigen::Index at = 0;
  for (const auto& obs : set.members()) {
    stacked.middleCols(at, obs.outcome_dim()) = obs.a0();
    at += obs.outcome_dim();
  }
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double cut = tol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  SubspaceSpan out;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > cut) ++out.dimension;
  }
  out.basis = svd.matrixU().leftCols(out.dimension);
  return out;
}

// Direction samples and covering radius.

/// Unit vectors in R^{2N}, u identified with -u.
class DirectionSample {
 public:
  DirectionSample() = default;
  explicit DirectionSample(const std::vector<Vector>& directions) {
    for (const auto& d : directions) add(d);
  }

  void add(const Vector& d) {
    const double norm = d.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw InvalidInputError("direction sample: zero or non-finite direction");
    }
    if (d.size() % 2 != 0 || (!directions_.empty() && d.size() != dim())) {
      throw DimensionError("direction sample: directions must share an even dimension");
    }
    directions_.push_back(d / norm);
  }

  bool empty() const noexcept { return directions_.empty(); }
  std::size_t size() const noexcept { return directions_.size(); }
  Eigen::Index dim() const { return directions_.empty() ? 0 : directions_.front().size(); }
  const std::vector<Vector>& directions() const noexcept { return directions_; }

 private:
  std::vector<Vector> directions_;
};

enum class FamilyKind { rotated, squeezed };

inline FamilyKind parse_family_kind(const std::string& name) {
  if (name == "rotated") return FamilyKind::rotated;
  if (name == "squeezed") return FamilyKind::squeezed;
  throw InvalidInputError("family_directions: unsupported family kind '" + name + "'");
}

/// rotated: a = (-sin t, cos t); squeezed: a = (-e^{-r} sin t, e^{r} cos t),
/// normalised, over the product thetas x rs.
inline DirectionSample family_directions(FamilyKind kind, const std::vector<double>& thetas,
                                         const std::vector<double>& rs = {}) {
  DirectionSample out;
  Vector a(2);
  if (kind == FamilyKind::rotated) {
    for (double t : thetas) {
      a << -std::sin(t), std::cos(t);
      out.add(a);
    }
    return out;
  }
  if (rs.empty()) throw InvalidInputError("family_directions: squeezed family needs an r grid");
  for (double t : thetas) {
    for (double r : rs) {
      a << -std::exp(-r) * std::sin(t), std::exp(r) * std::cos(t);
      out.add(a);
    }
  }
  return out;
}

inline constexpr std::size_t kDefaultProbeGrid = 10000;

namespace detail {

/// Deterministic quasi-uniform points on S^{d-1}: a Kronecker sequence in the
/// unit cube with irrational steps sqrt(prime), pushed through Box-Muller and
/// normalised.
inline std::vector<Vector> sphere_probes(Eigen::Index dim, std::size_t count) {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  const Eigen::Index even = dim + (dim % 2);
  if (even > static_cast<Eigen::Index>(std::size(kPrimes))) {
    throw DimensionError("sphere probes: dimension too large");
  }
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    Vector z(even);
    for (Eigen::Index i = 0; i < even; i += 2) {
      const double a1 = std::sqrt(static_cast<double>(kPrimes[i]));
      const double a2 = std::sqrt(static_cast<double>(kPrimes[i + 1]));
      double u1 = std::fmod(0.5 + k * a1, 1.0);
      const double u2 = std::fmod(0.5 + k * a2, 1.0);
      u1 = std::max(u1, 1e-300);
      const double rad = std::sqrt(-2.0 * std::log(u1));
      z(i) = rad * std::cos(2.0 * std::numbers::pi * u2);
      z(i + 1) = rad * std::sin(2.0 * std::numbers::pi * u2);
    }
    Vector v = z.head(dim);
    const double n = v.norm();
    if (n > 0.0) out.push_back(v / n);
  }
  return out;
}

inline double projective_distance(const Vector& u, const Vector& s) {
  return std::acos(std::min(1.0, std::abs(u.dot(s))));
}

}  // namespace detail

/// Largest geodesic distance from a point of the projective sphere to the
/// sample. On the circle (2N = 2) this is computed exactly as half the largest
/// gap between sample angles mod pi and probe_grid_size is unused; in higher
/// dimension it is a maximum over probe_grid_size deterministic probes.
inline double direction_coverage(const DirectionSample& sample,
                                 std::size_t probe_grid_size = kDefaultProbeGrid) {
  if (sample.empty()) throw InvalidInputError("direction_coverage: empty direction sample");
  if (sample.dim() == 2) {
    std::vector<double> angles;
    angles.reserve(sample.size());
    for (const auto& d : sample.directions()) {
      double phi = std::atan2(d(1), d(0));
      phi = std::fmod(phi + 2.0 * std::numbers::pi, std::numbers::pi);
      angles.push_back(phi);
    }
    std::sort(angles.begin(), angles.end());
    double gap = angles.front() + std::numbers::pi - angles.back();
    for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
    return 0.5 * gap;
  }
  if (probe_grid_size == 0) throw InvalidInputError("direction_coverage: empty probe grid");
  double worst = 0.0;
  for (const auto& probe : detail::sphere_probes(sample.dim(), probe_grid_size)) {
    double best = std::numbers::pi;
    for (const auto& d : sample.directions()) {
      best = std::min(best, detail::projective_distance(probe, d));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

// Gaussian witnesses of non-informational-completeness.

struct WitnessPair {
  GaussianState state_a;
  GaussianState state_b;
  ObservableSet certified_against;
  bool mean_shift = false;  // true: states differ in m only; false: in V only
};

/// Two distinct Gaussian states with identical outcome statistics for every
/// member, if the Gaussian parameter map (m, V) -> {A0^T Omega m,
/// (Omega A0)^T V (Omega A0)} has a nontrivial kernel. A mean shift is tried
/// first; otherwise the base V = 2I is perturbed by +-t Delta, with Delta
/// scaled to unit largest entry and t = min(1/2, half the largest step that
/// keeps V + i Omega >= 0). std::nullopt does not certify IC.
inline std::optional<WitnessPair> gaussian_witness(const ObservableSet& set,
                                                   double tol = kDefaultTol) {
  detail::require_nonempty_valid(set, tol, "gaussian_witness");
  const int n = set.n_modes();
  const int dim = 2 * n;
  const Matrix om = omega(n).matrix();
  const Vector zero = Vector::Zero(dim);
  const Matrix base = 2.0 * Matrix::Identity(dim, dim);

  const SubspaceSpan span = subspace_union_span(set, tol);
  if (span.dimension < dim) {
    // w orthogonal to every column of every A0; delta = -Omega w then has
    // A0^T Omega delta = -A0^T Omega^2 w = A0^T w = 0.
    const Matrix proj = Matrix::Identity(dim, dim) - span.basis * span.basis.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(detail::symmetric_part(proj));
    const Vector w = eig.eigenvectors().col(dim - 1);
    const Vector delta = -om * w;
    return WitnessPair{GaussianState(zero, base), GaussianState(delta, base), set, true};
  }

  // Orthonormal coordinates on Sym(2N): E_aa and (E_ab + E_ba)/sqrt(2).
  std::vector<std::pair<int, int>> coords;
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) coords.emplace_back(a, b);
  }
  auto basis_matrix = [&](std::size_t k) {
    Matrix e = Matrix::Zero(dim, dim);
    const auto [a, b] = coords[k];
    if (a == b) {
      e(a, a) = 1.0;
    } else {
      e(a, b) = e(b, a) = 1.0 / std::sqrt(2.0);
    }
    return e;
  };
  std::vector<Vector> rows;
  for (const auto& obs : set.members()) {
    const Matrix g = om * obs.a0();
    const Eigen::Index m = obs.outcome_dim();
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i; j < m; ++j) {
        Vector row(coords.size());
        for (std::size_t k = 0; k < coords.size(); ++k) {
          row(k) = g.col(i).dot(basis_matrix(k) * g.col(j));
        }
        rows.push_back(row);
      }
    }
  }
  Matrix constraint(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(coords.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) constraint.row(r) = rows[r].transpose();
  Eigen::JacobiSVD<Matrix> svd(constraint, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = tol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > cut) ++rank;
  }
  if (rank >= static_cast<Eigen::Index>(coords.size())) return std::nullopt;

  const Vector coeff = svd.matrixV().col(static_cast<Eigen::Index>(coords.size()) - 1);
  Matrix delta = Matrix::Zero(dim, dim);
  for (std::size_t k = 0; k < coords.size(); ++k) delta += coeff(k) * basis_matrix(k);
  delta /= delta.cwiseAbs().maxCoeff();

  // V +- t Delta + i Omega >= 0  <=>  I +- t H^{-1/2} Delta H^{-1/2} >= 0.
  const CMatrix h = detail::to_complex(base) + Complex(0.0, 1.0) * detail::to_complex(om);
  Eigen::SelfAdjointEigenSolver<CMatrix> heig(h);
  const CMatrix h_isqrt = heig.operatorInverseSqrt();
  const CMatrix scaled = h_isqrt * detail::to_complex(delta) * h_isqrt;
  Eigen::SelfAdjointEigenSolver<CMatrix> seig(0.5 * (scaled + scaled.adjoint()));
  const double spread = seig.eigenvalues().cwiseAbs().maxCoeff();
  const double t = std::min(0.5, 0.5 / spread);
  return WitnessPair{GaussianState(zero, base + t * delta), GaussianState(zero, base - t * delta),
                     set, false};
}

// Reconstruction of Gaussian states from outcome statistics.

struct Observation {
  GaussianObservable obs;
  GaussianDistribution dist;
};

struct Reconstruction {
  Vector m;
  Matrix v;
  double residual = 0.0;
  int rank = 0;
  int unknowns = 0;
  int nullspace_dim = 0;
  bool closed_form = false;
  std::optional<GaussianState> state;  // set when (m, V) satisfies the uncertainty relation
  double min_eigenvalue = 0.0;         // of V + i Omega

  bool identifiable() const noexcept { return nullspace_dim == 0; }
};

/// Least-squares inversion of the pushforward term matching
///   -A0^T Omega m = mu + v0,   G^T V G = 2 Sigma - B0,  G = Omega A0,
/// in the unknowns (m, upper triangle of V). A single observation with
/// square invertible A0 is inverted in closed form.
inline Reconstruction reconstruct_gaussian(const std::vector<Observation>& data,
                                           double tol = kDefaultTol) {
  if (data.empty()) throw InvalidInputError("reconstruct_gaussian: no observations");
  const int n = data.front().obs.n_modes();
  const int dim = 2 * n;
  for (const auto& o : data) {
    if (o.obs.n_modes() != n) {
      throw DimensionError("reconstruct_gaussian: observations act on different numbers of modes");
    }
    if (o.dist.mean.size() != o.obs.outcome_dim() || o.dist.cov.rows() != o.obs.outcome_dim() ||
        o.dist.cov.cols() != o.obs.outcome_dim()) {
      throw DimensionError("reconstruct_gaussian: statistics do not match the outcome dimension");
    }
  }
  const Matrix om = omega(n).matrix();

  std::vector<std::pair<int, int>> coords;
  for (int a = 0; a < dim; ++a) {
    for (int b = a; b < dim; ++b) coords.emplace_back(a, b);
  }
  const Eigen::Index unknowns = dim + static_cast<Eigen::Index>(coords.size());
  Eigen::Index n_rows = 0;
  for (const auto& o : data) {
    const Eigen::Index m = o.obs.outcome_dim();
    n_rows += m + m * (m + 1) / 2;
  }
  Matrix lhs = Matrix::Zero(n_rows, unknowns);
  Vector rhs(n_rows);
  Eigen::Index row = 0;
  for (const auto& o : data) {
    const Eigen::Index m = o.obs.outcome_dim();
    const Matrix mean_map = -o.obs.a0().transpose() * om;
    lhs.block(row, 0, m, dim) = mean_map;
    rhs.segment(row, m) = o.dist.mean + o.obs.v0();
    row += m;
    const Matrix g = om * o.obs.a0();
    const Matrix target = 2.0 * o.dist.cov - o.obs.b0();
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i; j < m; ++j) {
        for (std::size_t k = 0; k < coords.size(); ++k) {
          const auto [a, b] = coords[k];
          const double c = a == b ? g(a, i) * g(a, j) : g(a, i) * g(b, j) + g(b, i) * g(a, j);
          lhs(row, dim + static_cast<Eigen::Index>(k)) = c;
        }
        rhs(row) = target(i, j);
        ++row;
      }
    }
  }

  Eigen::JacobiSVD<Matrix> svd(lhs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(tol);
  Reconstruction out;
  out.unknowns = static_cast<int>(unknowns);
  out.rank = static_cast<int>(svd.rank());
  out.nullspace_dim = out.unknowns - out.rank;

  const auto& single = data.front().obs;
  if (data.size() == 1 && single.outcome_dim() == dim && ic_single(single, tol)) {
    const Matrix mean_map = -single.a0().transpose() * om;
    const Matrix g = om * single.a0();
    const Eigen::PartialPivLU<Matrix> lu_mean(mean_map);
    const Eigen::PartialPivLU<Matrix> lu_g(g);
    const Matrix g_inv = lu_g.inverse();
    out.m = lu_mean.solve(Vector(data.front().dist.mean + single.v0()));
    out.v = detail::symmetric_part(g_inv.transpose() *
                                   (2.0 * data.front().dist.cov - single.b0()) * g_inv);
    out.closed_form = true;
  } else {
    const Vector x = svd.solve(rhs);
    out.m = x.head(dim);
    out.v = Matrix::Zero(dim, dim);
    for (std::size_t k = 0; k < coords.size(); ++k) {
      const auto [a, b] = coords[k];
      out.v(a, b) = out.v(b, a) = x(dim + static_cast<Eigen::Index>(k));
    }
  }

  Vector x(unknowns);
  x.head(dim) = out.m;
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const auto [a, b] = coords[k];
    x(dim + static_cast<Eigen::Index>(k)) = out.v(a, b);
  }
  out.residual = (lhs * x - rhs).norm();
  out.min_eigenvalue = detail::hermitian_min_eigenvalue(
      CMatrix(detail::to_complex(out.v) + Complex(0.0, 1.0) * detail::to_complex(om)));
  if (out.min_eigenvalue >= -tol) out.state.emplace(out.m, out.v, tol);
  return out;
}

}  // namespace gaussmeas
