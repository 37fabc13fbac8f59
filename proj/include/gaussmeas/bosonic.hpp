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

// Bosonic observables E^(p) = W(A0 p) f0(p) for two families of f0:
//
//   SmearedGaussian  f0(p) = phi(p) exp(-p^T B0 p / 4 - i v0^T p), phi the
//                    characteristic function of a classical noise measure;
//   CovariantFock    A0 = -Omega_1, f0(p) = sigma^(Omega p) for a density
//                    matrix sigma in the truncated number basis.
//
// A set is IC iff the union of Y_j = {A0 p : f0(p) != 0} is dense. The probes
// below test that on a finite grid; verdicts are finite-resolution only.

#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "gaussmeas/fock_oracle.hpp"

namespace gaussmeas {

// Noise characteristic functions.

struct NoNoise {};

/// Gaussian measure with characteristic function exp(-p^T C p / 4 - i d^T p).
struct GaussianNoise {
  Matrix c;
  Vector d;
};

/// Product of triangular hats max(0, 1 - |p_i| / w_i): the characteristic
/// function of a product of Fejer kernels. Zero for |p_i| >= w_i.
struct FejerNoise {
  Vector widths;
};

/// phi(p) = sum_k s^|k| T((u^T p - k L) / w), T(t) = max(0, 1 - |t|), w <= L.
/// Its Fourier transform is a Fejer kernel times a Poisson kernel, both
/// nonnegative, so phi is a characteristic function. Zero wherever u^T p is
/// at distance >= w from L Z (only |u^T p| >= w when s = 0).
struct FejerComb {
  Vector direction;
  double spacing = 1.0;
  double width = 1.0;
  double decay = 0.0;
};

using NoiseModel = std::variant<NoNoise, GaussianNoise, FejerNoise, FejerComb>;

namespace detail {

inline double hat(double t) { return std::max(0.0, 1.0 - std::abs(t)); }

inline void validate_noise(const NoiseModel& noise, Eigen::Index m, double tol) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, GaussianNoise>) {
          if (n.c.rows() != m || n.c.cols() != m || n.d.size() != m) {
            throw DimensionError("Gaussian noise: C must be MxM and d of size M");
          }
          if (!is_symmetric(n.c, tol) || !psd_check(n.c, tol)) {
            throw InvalidNoiseError("Gaussian noise: C must be symmetric positive semidefinite");
          }
        } else if constexpr (std::is_same_v<T, FejerNoise>) {
          if (n.widths.size() != m) throw DimensionError("Fejer noise: one width per outcome");
          if ((n.widths.array() <= 0.0).any()) throw InvalidNoiseError("Fejer noise: widths must be > 0");
        } else if constexpr (std::is_same_v<T, FejerComb>) {
          if (n.direction.size() != m) throw DimensionError("Fejer comb: direction must lie in R^M");
          if (!(n.direction.norm() > 0.0)) throw InvalidNoiseError("Fejer comb: zero direction");
          if (!(n.width > 0.0) || !(n.spacing >= n.width)) {
            throw InvalidNoiseError("Fejer comb: need 0 < width <= spacing");
          }
          if (!(n.decay >= 0.0 && n.decay < 1.0)) {
            throw InvalidNoiseError("Fejer comb: decay must lie in [0, 1)");
          }
        }
      },
      noise);
}

}  // namespace detail

inline Complex noise_characteristic(const NoiseModel& noise, const Vector& p) {
  return std::visit(
      [&](const auto& n) -> Complex {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NoNoise>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, GaussianNoise>) {
          return std::exp(Complex(-0.25 * p.dot(n.c * p), -n.d.dot(p)));
        } else if constexpr (std::is_same_v<T, FejerNoise>) {
          double v = 1.0;
          for (Eigen::Index i = 0; i < p.size(); ++i) v *= detail::hat(p(i) / n.widths(i));
          return v;
        } else {
          const double t = n.direction.normalized().dot(p);
          if (n.decay == 0.0) return detail::hat(t / n.width);
          const long k0 = std::lround(t / n.spacing);
          double v = 0.0;
          for (long k = k0 - 1; k <= k0 + 1; ++k) {
            v += std::pow(n.decay, std::abs(k)) * detail::hat((t - k * n.spacing) / n.width);
          }
          return v;
        }
      },
      noise);
}

/// Whether p lies in the declared (exact) zero set of the noise.
inline bool noise_declared_zero(const NoiseModel& noise, const Vector& p) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NoNoise> || std::is_same_v<T, GaussianNoise>) {
          return false;
        } else if constexpr (std::is_same_v<T, FejerNoise>) {
          return ((p.array().abs() - n.widths.array()) >= 0.0).any();
        } else {
          const double t = n.direction.normalized().dot(p);
          if (n.decay == 0.0) return std::abs(t) >= n.width;
          const double r = std::abs(t - n.spacing * std::round(t / n.spacing));
          return r >= n.width;
        }
      },
      noise);
}

inline std::string noise_kind(const NoiseModel& noise) {
  static const char* names[] = {"none", "gaussian", "fejer", "fejer_comb"};
  return names[noise.index()];
}

// Observable families.

struct SmearedGaussian {
  GaussianObservable base;
  NoiseModel noise;
};

struct CovariantFock {
  fock::FockOperator sigma;
};

class BosonicObservable {
 public:
  BosonicObservable(SmearedGaussian f0, double tol = kDefaultTol) : family_(std::move(f0)) {
    const auto& s = std::get<SmearedGaussian>(family_);
    require_valid(s.base, tol, "bosonic observable");
    detail::validate_noise(s.noise, s.base.outcome_dim(), tol);
    a0_ = s.base.a0();
  }

  BosonicObservable(CovariantFock f0, double tol = 1e-10) : family_(std::move(f0)) {
    const auto& c = std::get<CovariantFock>(family_);
    const auto report = fock::validate_density(c.sigma, tol);
    if (!report.valid) {
      throw InvalidInputError("bosonic observable: sigma is not a unit-trace positive operator");
    }
    a0_ = -omega(1).matrix();
    weyl_ = std::make_shared<const fock::FockWeyl>(c.sigma.cutoff);
    truncation_weight_ = fock::truncation_weight(c.sigma);
  }

  bool is_covariant_fock() const noexcept { return family_.index() == 1; }
  const Matrix& a0() const noexcept { return a0_; }
  int n_modes() const noexcept { return static_cast<int>(a0_.rows() / 2); }
  int outcome_dim() const noexcept { return static_cast<int>(a0_.cols()); }
  const SmearedGaussian& smeared() const { return std::get<SmearedGaussian>(family_); }
  const CovariantFock& covariant_fock() const { return std::get<CovariantFock>(family_); }
  const fock::FockWeyl& weyl() const { return *weyl_; }
  double truncation_weight() const noexcept { return truncation_weight_; }
  bool truncation_warning() const noexcept {
    return truncation_weight_ > fock::kTruncationWarning;
  }

  /// Smooth nowhere-vanishing factor of f0 (the Gaussian envelope, including
  /// Gaussian noise), 1 for CovariantFock; f0 = envelope * zero_factor.
  Complex envelope(const Vector& p) const {
    if (is_covariant_fock()) return 1.0;
    const auto& b = smeared().base;
    const Complex base = std::exp(Complex(-0.25 * p.dot(b.b0() * p), -b.v0().dot(p)));
    if (std::holds_alternative<GaussianNoise>(smeared().noise)) {
      return base * noise_characteristic(smeared().noise, p);
    }
    return base;
  }

  /// The factor of f0 that carries its zeros.
  Complex zero_factor(const Vector& p) const {
    if (p.size() != outcome_dim()) {
      throw DimensionError("f0: argument must lie in R^" + std::to_string(outcome_dim()));
    }
    if (is_covariant_fock()) {
      return weyl_->trace_with(covariant_fock().sigma.matrix, omega(1).matrix() * p);
    }
    if (std::holds_alternative<GaussianNoise>(smeared().noise)) return 1.0;
    return noise_characteristic(smeared().noise, p);
  }

 private:
  std::variant<SmearedGaussian, CovariantFock> family_;
  Matrix a0_;
  std::shared_ptr<const fock::FockWeyl> weyl_;
  double truncation_weight_ = 0.0;
};

inline Complex f0_eval(const BosonicObservable& obs, const Vector& p) {
  return obs.zero_factor(p) * obs.envelope(p);
}

// Grids and zero detection.

inline constexpr double kDefaultZeroThreshold = 1e-8;

/// Uniform grid with `points` nodes on [-range, range] in each coordinate.
struct GridSpec {
  int points = 101;
  double range = 4.0;

  double spacing() const { return 2.0 * range / (points - 1); }
};

namespace detail {

inline constexpr std::size_t kMaxGridPoints = 4'000'000;

class Grid {
 public:
  Grid(const GridSpec& spec, Eigen::Index dim) : spec_(spec), dim_(dim) {
    if (spec.points < 2 || !(spec.range > 0.0)) {
      throw InvalidInputError("grid: need at least 2 points and a positive range");
    }
    total_ = 1;
    for (Eigen::Index i = 0; i < dim; ++i) {
      total_ *= static_cast<std::size_t>(spec.points);
      if (total_ > kMaxGridPoints) throw InvalidInputError("grid: too many points");
    }
  }

  std::size_t size() const noexcept { return total_; }
  Eigen::Index dim() const noexcept { return dim_; }
  int points() const noexcept { return spec_.points; }

  Vector point(std::size_t index) const {
    Vector x(dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) {
      x(i) = -spec_.range + spec_.spacing() * static_cast<double>(index % spec_.points);
      index /= spec_.points;
    }
    return x;
  }

  std::size_t stride(Eigen::Index axis) const {
    std::size_t s = 1;
    for (Eigen::Index i = 0; i < axis; ++i) s *= static_cast<std::size_t>(spec_.points);
    return s;
  }

  int coordinate(std::size_t index, Eigen::Index axis) const {
    return static_cast<int>((index / stride(axis)) % spec_.points);
  }

  bool on_boundary(std::size_t index) const {
    for (Eigen::Index i = 0; i < dim_; ++i) {
      const int c = coordinate(index, i);
      if (c == 0 || c == spec_.points - 1) return true;
    }
    return false;
  }

 private:
  GridSpec spec_;
  Eigen::Index dim_;
  std::size_t total_ = 1;
};

/// Zero classification: |f| <= threshold * max|f|, or the smaller endpoint of
/// any grid edge across which f changes sign (phase jump > pi/2).
inline std::vector<char> zero_mask(const Grid& grid, const std::vector<Complex>& f,
                                   double threshold) {
  double peak = 0.0;
  for (const auto& z : f) peak = std::max(peak, std::abs(z));
  std::vector<char> zero(f.size(), 0);
  for (std::size_t i = 0; i < f.size(); ++i) zero[i] = std::abs(f[i]) <= threshold * peak;
  for (Eigen::Index axis = 0; axis < grid.dim(); ++axis) {
    const std::size_t step = grid.stride(axis);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (grid.coordinate(i, axis) == grid.points() - 1) continue;
      const std::size_t j = i + step;
      if ((f[i] * std::conj(f[j])).real() < 0.0) {
        zero[std::abs(f[i]) <= std::abs(f[j]) ? i : j] = 1;
      }
    }
  }
  return zero;
}

/// Squared Euclidean distance (in grid units) from each node to the nearest
/// node with covered != 0; separable lower-envelope transform along each axis.
inline std::vector<double> squared_distance_to_covered(const Grid& grid,
                                                       const std::vector<char>& covered) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(covered.size());
  for (std::size_t i = 0; i < covered.size(); ++i) dist[i] = covered[i] ? 0.0 : inf;
  const int n = grid.points();
  std::vector<double> line(n), out(n), z(n + 1);
  std::vector<int> v(n);
  for (Eigen::Index axis = 0; axis < grid.dim(); ++axis) {
    const std::size_t step = grid.stride(axis);
    for (std::size_t start = 0; start < dist.size(); ++start) {
      if (grid.coordinate(start, axis) != 0) continue;
      for (int q = 0; q < n; ++q) line[q] = dist[start + q * step];
      int k = -1;
      for (int q = 0; q < n; ++q) {
        if (line[q] == inf) continue;
        double s = -inf;
        while (k >= 0) {
          s = ((line[q] + q * q) - (line[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]));
          if (s > z[k]) break;
          --k;
        }
        ++k;
        v[k] = q;
        z[k] = k == 0 ? -inf : s;
        z[k + 1] = inf;
      }
      if (k < 0) continue;  // nothing finite on this line
      int j = 0;
      for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        const double d = q - v[j];
        out[q] = d * d + line[v[j]];
      }
      for (int q = 0; q < n; ++q) dist[start + q * step] = out[q];
    }
  }
  return dist;
}

struct HoleSummary {
  double radius = 0.0;  // physical units; +inf if nothing is covered
  Vector center;
};

inline HoleSummary largest_hole(const Grid& grid, const std::vector<char>& covered,
                                double spacing) {
  HoleSummary out;
  out.center = Vector::Zero(grid.dim());
  const auto dist = squared_distance_to_covered(grid, covered);
  std::size_t arg = 0;
  double best = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] > best) {
      best = dist[i];
      arg = i;
    }
  }
  out.radius = std::isinf(best) ? best : std::sqrt(best) * spacing;
  if (best > 0.0) out.center = grid.point(arg);
  return out;
}

}  // namespace detail

/// Zero structure of f0 on a grid in outcome space R^M.
struct SupportProbe {
  GridSpec grid;
  int dim = 0;
  double threshold = kDefaultZeroThreshold;
  std::vector<Vector> points;
  std::vector<Complex> values;
  std::vector<char> zero_mask;
  std::vector<Vector> y_set_sample;  // A0 p for the nonzero points
  double nonzero_fraction = 0.0;
  double hole_radius = 0.0;
  Vector hole_center;
  bool bounded_support = false;  // no nonzero point on the grid boundary
  double zero_radius_min = 0.0;  // range of |p| over the zero points
  double zero_radius_max = 0.0;
  bool truncation_warning = false;
};

/// The threshold is applied to the zero-carrying factor of f0; the Gaussian
/// envelope of SmearedGaussian never vanishes and would otherwise turn its
/// far tails into spurious numerical zeros.
inline SupportProbe support_probe(const BosonicObservable& obs, const GridSpec& spec = {},
                                  double threshold = kDefaultZeroThreshold) {
  const detail::Grid grid(spec, obs.outcome_dim());
  SupportProbe out;
  out.grid = spec;
  out.dim = obs.outcome_dim();
  out.threshold = threshold;
  out.truncation_warning = obs.truncation_warning();
  std::vector<Complex> factor(grid.size());
  out.points.reserve(grid.size());
  out.values.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.points.push_back(grid.point(i));
    factor[i] = obs.zero_factor(out.points.back());
    out.values.push_back(factor[i] * obs.envelope(out.points.back()));
  }
  out.zero_mask = detail::zero_mask(grid, factor, threshold);

  std::vector<char> covered(grid.size());
  std::size_t nonzero = 0;
  bool first_zero = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    covered[i] = !out.zero_mask[i];
    if (covered[i]) {
      ++nonzero;
      out.y_set_sample.push_back(obs.a0() * out.points[i]);
    } else {
      const double r = out.points[i].norm();
      out.zero_radius_min = first_zero ? r : std::min(out.zero_radius_min, r);
      out.zero_radius_max = first_zero ? r : std::max(out.zero_radius_max, r);
      first_zero = false;
    }
  }
  out.nonzero_fraction = static_cast<double>(nonzero) / static_cast<double>(grid.size());
  const auto hole = detail::largest_hole(grid, covered, spec.spacing());
  out.hole_radius = hole.radius;
  out.hole_center = hole.center;
  out.bounded_support = nonzero > 0;
  for (std::size_t i = 0; i < grid.size() && out.bounded_support; ++i) {
    if (covered[i] && grid.on_boundary(i)) out.bounded_support = false;
  }
  return out;
}

struct BosonicVerdict {
  bool ic_consistent = false;
  std::string evidence_kind;  // "none", "zero-ball", "bounded-support", "lower-dimensional"
  double hole_radius = 0.0;
  Vector hole_center;
  double spacing = 0.0;
  double covered_fraction = 0.0;
  int full_rank_members = 0;
  int skipped_members = 0;
  double zero_radius_min = 0.0;  // range of |x| over uncovered phase-space points
  double zero_radius_max = 0.0;
  bool truncation_warning = false;

  std::string verdict() const { return ic_consistent ? "IC-consistent" : "not-IC"; }
};

inline constexpr int kFiberOffsets = 21;

/// Probes the union of the Y_j on a phase-space grid. A point x is covered by
/// a member with rank A0 = 2N if f0 is nonzero somewhere on the fibre
/// {p : A0 p = x} (exactly p = A0^{-1} x when M = 2N; for M > 2N the fibre is
/// sampled at 21 offsets per kernel dimension, kernel dimension <= 2).
/// Members with rank A0 < 2N have Y_j inside a proper subspace, which is
/// nowhere dense, and are skipped. not-IC is reported when the grid contains
/// an uncovered ball of radius >= 2 grid spacings.
inline BosonicVerdict ic_bosonic_verdict(const std::vector<BosonicObservable>& set,
                                         const GridSpec& spec = {},
                                         double threshold = kDefaultZeroThreshold,
                                         double tol = kDefaultTol) {
  if (set.empty()) throw InvalidInputError("ic_bosonic_verdict: empty set");
  const int n = set.front().n_modes();
  for (const auto& obs : set) {
    if (obs.n_modes() != n) throw DimensionError("ic_bosonic_verdict: members act on different mode numbers");
  }
  const int dim = 2 * n;
  const detail::Grid grid(spec, dim);
  BosonicVerdict out;
  out.spacing = spec.spacing();
  out.hole_center = Vector::Zero(dim);
  std::vector<char> covered(grid.size(), 0);

  for (const auto& obs : set) {
    if (detail::numerical_rank(obs.a0(), tol) < dim) {
      ++out.skipped_members;
      continue;
    }
    ++out.full_rank_members;
    out.truncation_warning = out.truncation_warning || obs.truncation_warning();
    const Eigen::Index m = obs.outcome_dim();
    Eigen::JacobiSVD<Matrix> svd(obs.a0(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix kernel = svd.matrixV().rightCols(m - dim);
    if (kernel.cols() > 2) {
      throw InvalidInputError("ic_bosonic_verdict: fibre sampling supports kernel dimension <= 2");
    }
    std::vector<Vector> offsets;
    if (kernel.cols() == 0) {
      offsets.push_back(Vector::Zero(m));
    } else {
      const int count = kernel.cols() == 1 ? kFiberOffsets : kFiberOffsets * kFiberOffsets;
      for (int k = 0; k < count; ++k) {
        Vector c(kernel.cols());
        int idx = k;
        for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
          c(j) = -spec.range + 2.0 * spec.range * (idx % kFiberOffsets) / (kFiberOffsets - 1);
          idx /= kFiberOffsets;
        }
        offsets.push_back(kernel * c);
      }
    }
    const Matrix pinv = svd.solve(Matrix::Identity(dim, dim));
    // For each offset, classify zeros of x -> f0(A0^+ x + offset) on the grid;
    // a point is covered by this member if some offset leaves it nonzero.
    std::vector<Complex> f(grid.size());
    for (const auto& off : offsets) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        f[i] = obs.zero_factor(Vector(pinv * grid.point(i) + off));
      }
      const auto zero = detail::zero_mask(grid, f, threshold);
      for (std::size_t i = 0; i < grid.size(); ++i) covered[i] = covered[i] || !zero[i];
    }
  }

  std::size_t n_covered = 0;
  bool first_zero = true;
  bool boundary_covered = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (covered[i]) {
      ++n_covered;
      boundary_covered = boundary_covered || grid.on_boundary(i);
    } else {
      const double r = grid.point(i).norm();
      out.zero_radius_min = first_zero ? r : std::min(out.zero_radius_min, r);
      out.zero_radius_max = first_zero ? r : std::max(out.zero_radius_max, r);
      first_zero = false;
    }
  }
  out.covered_fraction = static_cast<double>(n_covered) / static_cast<double>(grid.size());

  if (out.full_rank_members == 0) {
    out.ic_consistent = false;
    out.evidence_kind = "lower-dimensional";
    out.hole_radius = std::numeric_limits<double>::infinity();
    return out;
  }
  const auto hole = detail::largest_hole(grid, covered, out.spacing);
  out.hole_radius = hole.radius;
  out.hole_center = hole.center;
  if (hole.radius >= 2.0 * out.spacing * (1.0 - 1e-12)) {
    out.ic_consistent = false;
    out.evidence_kind = (n_covered > 0 && !boundary_covered) ? "bounded-support" : "zero-ball";
  } else {
    out.ic_consistent = true;
    out.evidence_kind = "none";
  }
  return out;
}

}  // namespace gaussmeas
