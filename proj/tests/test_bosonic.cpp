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


#include <gtest/gtest.h>

#include "support/generators.hpp"

namespace gm = gaussmeas;
namespace fk = gaussmeas::fock;
using gm::Complex;
using gm::Matrix;
using gm::Vector;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

gm::BosonicObservable fock_generated(int n) { return gm::BosonicObservable(gm::CovariantFock{fk::number_state(n, 40)}); }

gm::BosonicObservable fejer_q_function(double width = 1.0) {
  return gm::BosonicObservable(gm::SmearedGaussian{gm::q_function(1), gm::FejerNoise{Vector::Constant(2, width)}});
}

gm::BosonicObservable comb(double spacing, double width, double decay) {
  return gm::BosonicObservable(
      gm::SmearedGaussian{gm::q_function(1), gm::FejerComb{vec2(1, 0), spacing, width, decay}});
}

}  // namespace

TEST(F0Eval, Examples) {
  EXPECT_NEAR(std::abs(gm::f0_eval(fock_generated(0), Vector::Zero(2)) - 1.0), 0.0, 1e-12);
  const auto one = fock_generated(1);
  for (int a = 0; a < 8; ++a) {
    const Vector p = std::sqrt(2.0) * vec2(std::cos(a), std::sin(a));
    EXPECT_NEAR(std::abs(gm::f0_eval(one, p)), 0.0, 1e-10);
  }
  const auto fej = gm::BosonicObservable(
      gm::SmearedGaussian{gm::rotated_quadrature(0.0), gm::FejerNoise{Vector::Constant(1, 1.0)}});
  EXPECT_EQ(gm::f0_eval(fej, Vector::Constant(1, 2.0)), Complex(0.0));
  EXPECT_NEAR(gm::f0_eval(fej, Vector::Constant(1, 0.5)).real(), 0.5, 1e-15);
}

// Closed form of the |1><1| transform at the same argument.
TEST(F0Eval, OnePhotonClosedForm) {
  const auto one = fock_generated(1);
  gm::testing::Gen g(81);
  for (int t = 0; t < 20; ++t) {
    const Vector p = 1.2 * g.vector(2);
    const double s = p.squaredNorm();
    EXPECT_NEAR(std::abs(gm::f0_eval(one, p) - (1 - s / 2) * std::exp(-s / 4)), 0.0, 1e-8);
  }
}

TEST(F0Eval, HermitianSymmetry) {
  gm::testing::Gen g(82);
  std::vector<gm::BosonicObservable> obs = {fock_generated(2), fejer_q_function(1.3), comb(2.0, 0.55, 0.4)};
  obs.emplace_back(gm::CovariantFock{fk::gaussian_state(g.state(1, 0.5), 40)}, 1e-6);
  obs.emplace_back(gm::SmearedGaussian{g.observable(1, 2), gm::GaussianNoise{Matrix::Identity(2, 2), vec2(0.3, -0.1)}});
  for (const auto& o : obs) {
    for (int k = 0; k < 10; ++k) {
      const Vector p = g.vector(2);
      EXPECT_NEAR(std::abs(gm::f0_eval(o, -p) - std::conj(gm::f0_eval(o, p))), 0.0, 1e-10);
    }
  }
}

TEST(Noise, InvalidModels) {
  const auto q = gm::q_function(1);
  EXPECT_THROW(gm::BosonicObservable(gm::SmearedGaussian{q, gm::FejerNoise{Vector::Constant(2, -1.0)}}),
               gm::InvalidNoiseError);
  EXPECT_THROW(gm::BosonicObservable(gm::SmearedGaussian{q, gm::FejerComb{vec2(1, 0), 1.0, 2.0, 0.0}}),
               gm::InvalidNoiseError);
  EXPECT_THROW(gm::BosonicObservable(gm::SmearedGaussian{q, gm::FejerComb{vec2(1, 0), 2.0, 1.0, 1.0}}),
               gm::InvalidNoiseError);
  EXPECT_THROW(gm::BosonicObservable(gm::SmearedGaussian{q, gm::GaussianNoise{-Matrix::Identity(2, 2), vec2(0, 0)}}),
               gm::InvalidNoiseError);
  EXPECT_THROW(gm::BosonicObservable(gm::CovariantFock{fk::FockOperator{3, gm::CMatrix::Identity(3, 3)}}),
               gm::InvalidInputError);
}

// The comb characteristic function is positive definite: Gram matrices
// [phi(p_i - p_j)] on random point sets have no negative eigenvalue.
TEST(Noise, CombIsPositiveDefinite) {
  gm::testing::Gen g(83);
  const gm::NoiseModel noise = gm::FejerComb{vec2(1, 0), 2.0, 0.55, 0.5};
  for (int t = 0; t < 20; ++t) {
    const int n = 25;
    std::vector<Vector> pts;
    for (int i = 0; i < n; ++i) pts.push_back(3.0 * g.vector(2));
    Matrix gram(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) gram(i, j) = gm::noise_characteristic(noise, Vector(pts[i] - pts[j])).real();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(SupportProbe, Vacuum) {
  const auto probe = gm::support_probe(fock_generated(0));
  EXPECT_EQ(probe.nonzero_fraction, 1.0);
  EXPECT_EQ(probe.hole_radius, 0.0);
  EXPECT_FALSE(probe.bounded_support);
}

TEST(SupportProbe, OnePhotonZeroCircle) {
  const gm::GridSpec spec;
  const auto probe = gm::support_probe(fock_generated(1), spec);
  EXPECT_LT(probe.nonzero_fraction, 1.0);
  EXPECT_GT(probe.nonzero_fraction, 0.9);
  EXPECT_NEAR(probe.zero_radius_min, std::sqrt(2.0), spec.spacing());
  EXPECT_NEAR(probe.zero_radius_max, std::sqrt(2.0), spec.spacing());
  EXPECT_LT(probe.hole_radius, 2.0 * spec.spacing());
}

TEST(SupportProbe, FejerBoundedSupport) {
  const auto probe = gm::support_probe(fejer_q_function());
  EXPECT_TRUE(probe.bounded_support);
  for (std::size_t i = 0; i < probe.points.size(); ++i) {
    if (probe.points[i].cwiseAbs().maxCoeff() > 1.0 + 1e-12) {
      EXPECT_TRUE(probe.zero_mask[i]);
    }
  }
  EXPECT_GT(probe.hole_radius, 2.0);
}

TEST(SupportProbe, GaussianEnvelopeIsNotAZero) {
  const auto wide = gm::BosonicObservable(
      gm::SmearedGaussian{gm::q_function(1), gm::GaussianNoise{9.0 * Matrix::Identity(2, 2), vec2(0, 0)}});
  EXPECT_EQ(gm::support_probe(wide).nonzero_fraction, 1.0);
}

TEST(Verdict, Examples) {
  const gm::GridSpec spec;
  const auto vac = gm::ic_bosonic_verdict({fock_generated(0)}, spec);
  EXPECT_TRUE(vac.ic_consistent);
  EXPECT_EQ(vac.evidence_kind, "none");

  const auto one = gm::ic_bosonic_verdict({fock_generated(1)}, spec);
  EXPECT_TRUE(one.ic_consistent);
  EXPECT_NEAR(one.zero_radius_min, std::sqrt(2.0), spec.spacing());
  EXPECT_NEAR(one.zero_radius_max, std::sqrt(2.0), spec.spacing());

  const auto fej = gm::ic_bosonic_verdict({fejer_q_function()}, spec);
  EXPECT_FALSE(fej.ic_consistent);
  EXPECT_EQ(fej.evidence_kind, "bounded-support");
  EXPECT_GT(fej.hole_radius, 2.0 * spec.spacing());
  EXPECT_THROW(gm::ic_bosonic_verdict({}, spec), gm::InvalidInputError);
}

TEST(Verdict, ComplementaryZeroBalls) {
  const auto a = comb(4.0, 1.5, 0.5);
  const auto b = comb(2.0, 0.55, 0.5);
  const auto va = gm::ic_bosonic_verdict({a});
  const auto vb = gm::ic_bosonic_verdict({b});
  EXPECT_FALSE(va.ic_consistent);
  EXPECT_FALSE(vb.ic_consistent);
  EXPECT_EQ(va.evidence_kind, "zero-ball");
  EXPECT_EQ(vb.evidence_kind, "zero-ball");
  // Each hole centre is a genuine zero of that member only.
  const Vector pa = gm::omega(1).matrix() * va.hole_center;
  EXPECT_NEAR(std::abs(gm::f0_eval(a, pa)), 0.0, 1e-15);
  EXPECT_GT(std::abs(gm::f0_eval(b, pa)) / std::abs(a.envelope(pa)), 1e-3);
  const auto pair = gm::ic_bosonic_verdict({a, b});
  EXPECT_TRUE(pair.ic_consistent);
}

TEST(Verdict, RankDeficientMembersAreSkipped) {
  const auto quad = gm::BosonicObservable(gm::SmearedGaussian{gm::rotated_quadrature(0.3), gm::NoNoise{}});
  const auto v = gm::ic_bosonic_verdict({quad});
  EXPECT_FALSE(v.ic_consistent);
  EXPECT_EQ(v.evidence_kind, "lower-dimensional");
  EXPECT_EQ(v.skipped_members, 1);
}

// Gaussian f0 never vanishes, so the probe verdict must agree with the rank
// criterion for every Gaussian observable.
TEST(Verdict, AgreesWithRankCriterionOnGaussians) {
  gm::testing::Gen g(84);
  const gm::GridSpec coarse{41, 4.0};
  for (int t = 0; t < 50; ++t) {
    const int m = g.integer(1, 3);
    const auto base = t % 3 == 0 ? g.rank_one_observable(1, m) : g.observable(1, m);
    const auto obs = gm::BosonicObservable(gm::SmearedGaussian{base, gm::NoNoise{}});
    EXPECT_EQ(gm::ic_bosonic_verdict({obs}, coarse).ic_consistent, gm::ic_single(base)) << t;
  }
}
