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
using gm::Complex;
using gm::Matrix;
using gm::Vector;
using gm::testing::max_abs_diff;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Matrix row2(double a, double b) {
  Matrix p(1, 2);
  p << a, b;
  return p;
}

gm::GaussianObservable q0() { return gm::rotated_quadrature(0.0); }

gm::Classification cls(bool c, bool s, bool cov, bool ic) {
  gm::Classification out;
  out.commutative = c;
  out.sharp = s;
  out.covariant = cov;
  out.informationally_complete = ic;
  return out;
}

}  // namespace

TEST(ValidateObservable, Examples) {
  const auto qf = gm::validate_observable(gm::q_function(1));
  EXPECT_TRUE(qf.valid);
  EXPECT_NEAR(qf.min_eigenvalue, 0.0, 1e-14);
  const auto bad = gm::validate_observable(
      gm::GaussianObservable(-gm::omega(1).matrix(), Matrix::Zero(2, 2), Vector::Zero(2)));
  EXPECT_FALSE(bad.valid);
  EXPECT_NEAR(bad.min_eigenvalue, -1.0, 1e-14);
  EXPECT_TRUE(gm::validate_observable(q0()).valid);
}

TEST(ValidateObservable, BoundarySensitivity) {
  const auto shrunk = gm::GaussianObservable(-gm::omega(1).matrix(), 0.99 * Matrix::Identity(2, 2),
                                             Vector::Zero(2));
  EXPECT_FALSE(gm::validate_observable(shrunk, 1e-9).valid);
}

TEST(ValidateObservable, DimensionErrors) {
  EXPECT_THROW(gm::GaussianObservable(Matrix::Zero(3, 1), Matrix::Zero(1, 1), Vector::Zero(1)),
               gm::DimensionError);
  EXPECT_THROW(gm::GaussianObservable(Matrix::Zero(2, 2), Matrix::Zero(1, 1), Vector::Zero(2)),
               gm::DimensionError);
}

TEST(ValidateObservable, RandomBoundaryObservablesAreValid) {
  gm::testing::Gen g(41);
  for (int t = 0; t < 100; ++t) {
    const auto obs = g.observable(g.integer(1, 2), g.integer(1, 4), true);
    const auto r = gm::validate_observable(obs);
    EXPECT_TRUE(r.valid);
    EXPECT_LT(std::abs(r.min_eigenvalue), 1e-9);
  }
}

TEST(Pushforward, Examples) {
  const auto vac = gm::GaussianState::vacuum(1);
  const auto d = gm::pushforward(gm::q_function(1), vac);
  EXPECT_LT(max_abs_diff(d.mean, Vector::Zero(2)), 1e-15);
  EXPECT_LT(max_abs_diff(d.cov, Matrix::Identity(2, 2)), 1e-15);

  const auto dq = gm::pushforward(q0(), vac);
  EXPECT_NEAR(dq.cov(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(dq.mean(0), 0.0, 1e-15);

  const Vector m = vec2(0.8, -1.3);
  const auto dc = gm::pushforward(gm::q_function(1), gm::GaussianState::coherent(m));
  EXPECT_LT(max_abs_diff(dc.mean, m), 1e-15);
  EXPECT_LT(max_abs_diff(dc.cov, Matrix::Identity(2, 2)), 1e-15);

  EXPECT_THROW(gm::pushforward(gm::q_function(2), vac), gm::DimensionError);
}

TEST(Pushforward, CharacteristicFunctionsAgree) {
  gm::testing::Gen g(42);
  for (int t = 0; t < 100; ++t) {
    const int n = g.integer(1, 2);
    const auto obs = g.observable(n, g.integer(1, 4));
    const auto s = g.state(n);
    const auto dist = gm::pushforward(obs, s);
    for (int k = 0; k < 5; ++k) {
      const Vector p = 0.5 * g.vector(obs.outcome_dim());
      EXPECT_NEAR(std::abs(dist.characteristic(p) - gm::pushforward_characteristic(obs, s, p)), 0.0,
                  1e-12);
    }
  }
}

TEST(Pushforward, MatchesFockOracle) {
  const int cutoff = 40;
  const gm::fock::FockWeyl weyl(cutoff);
  const Vector m = vec2(0.5, 0.3);
  const auto coh = gm::fock::coherent(m, cutoff);
  const auto one = gm::GaussianObservable(-gm::omega(1).matrix(), 1.5 * Matrix::Identity(2, 2), vec2(0.2, 0));
  for (int k = 0; k < 12; ++k) {
    const Vector p = 1.5 * vec2(std::cos(0.5 * k), std::sin(0.5 * k));
    const auto oracle = gm::fock::oracle_pushforward_char(one, coh, p, weyl);
    const auto dist = gm::pushforward(one, gm::GaussianState::coherent(m));
    EXPECT_LT(std::abs(dist.characteristic(p) - oracle.value), 1e-8);
  }
}

TEST(Classify, Examples) {
  EXPECT_EQ(gm::classify(q0()), cls(true, true, false, false));
  EXPECT_EQ(gm::classify(gm::q_function(1)), cls(false, false, true, true));
  EXPECT_EQ(gm::classify(gm::GaussianObservable(vec2(0, 1), Matrix::Ones(1, 1), Vector::Zero(1))),
            cls(true, false, false, false));
}

// For N = 1, M = 2 the form A0^T Omega A0 equals det(A0) Omega_1, so the
// observable is commutative exactly when A0 is singular.
TEST(Classify, SingleModeTwoOutcomesIcIffNoncommutative) {
  gm::testing::Gen g(43);
  for (int t = 0; t < 200; ++t) {
    const auto obs = t % 2 ? g.observable(1, 2) : g.rank_one_observable(1, 2);
    const auto c = gm::classify(obs);
    const double det = obs.a0().determinant();
    EXPECT_EQ(c.informationally_complete, std::abs(det) > 1e-9);
    EXPECT_EQ(c.commutative, !c.informationally_complete);
  }
}

TEST(Classify, RankOneIsCommutativeAndNotIc) {
  gm::testing::Gen g(44);
  for (int t = 0; t < 50; ++t) {
    const int n = g.integer(1, 2);
    const auto c = gm::classify(g.rank_one_observable(n, g.integer(1, 4)));
    EXPECT_TRUE(c.commutative);
    EXPECT_FALSE(c.informationally_complete);
  }
}

TEST(LinearPostprocess, Examples) {
  gm::testing::Gen g(45);
  const auto obs = g.observable(2, 3);
  const auto same = gm::linear_postprocess(obs, Matrix::Identity(3, 3));
  EXPECT_EQ(max_abs_diff(same.a0(), obs.a0()), 0.0);
  EXPECT_EQ(max_abs_diff(same.b0(), obs.b0()), 0.0);

  const auto marg = gm::linear_postprocess(gm::q_function(1), row2(1, 0));
  EXPECT_LT(max_abs_diff(marg.a0(), vec2(0, 1)), 1e-15);
  EXPECT_NEAR(marg.b0()(0, 0), 1.0, 1e-15);
  EXPECT_THROW(gm::linear_postprocess(obs, Matrix::Identity(2, 2)), gm::DimensionError);
}

TEST(LinearPostprocess, PreservesValidityAndStatistics) {
  gm::testing::Gen g(46);
  for (int t = 0; t < 100; ++t) {
    const int n = g.integer(1, 2);
    const auto obs = g.observable(n, g.integer(1, 4));
    const Matrix p = g.matrix(g.integer(1, 3), obs.outcome_dim());
    const auto post = gm::linear_postprocess(obs, p);
    EXPECT_TRUE(gm::validate_observable(post, 1e-9).valid);
    // Outcome law pushed through p: mean p mu, covariance p Sigma p^T.
    const auto s = g.state(n);
    const auto d = gm::pushforward(obs, s);
    const auto dp = gm::pushforward(post, s);
    EXPECT_LT(max_abs_diff(dp.mean, p * d.mean), 1e-10);
    EXPECT_LT(max_abs_diff(dp.cov, p * d.cov * p.transpose()), 1e-10);
  }
}

TEST(LinearPostprocess, InvertibleKeepsIc) {
  gm::testing::Gen g(47);
  for (int t = 0; t < 50; ++t) {
    const int n = g.integer(1, 2);
    const auto obs = g.observable(n, 2 * n);
    ASSERT_TRUE(gm::classify(obs).informationally_complete);
    const Matrix p = g.matrix(2 * n, 2 * n) + 3.0 * Matrix::Identity(2 * n, 2 * n);
    EXPECT_TRUE(gm::classify(gm::linear_postprocess(obs, p)).informationally_complete);
  }
}

TEST(Smear, Examples) {
  const auto obs = q0();
  const auto same = gm::smear(obs, Matrix::Zero(1, 1), Vector::Zero(1));
  EXPECT_EQ(max_abs_diff(same.b0(), obs.b0()), 0.0);
  const auto noisy = gm::smear(obs, Matrix::Ones(1, 1), Vector::Zero(1));
  EXPECT_EQ(noisy.b0()(0, 0), 1.0);
  EXPECT_EQ(max_abs_diff(noisy.a0(), obs.a0()), 0.0);
  EXPECT_THROW(gm::smear(obs, -Matrix::Ones(1, 1), Vector::Zero(1)), gm::InvalidNoiseError);
  EXPECT_THROW(gm::smear(obs, Matrix::Ones(2, 2), Vector::Zero(2)), gm::DimensionError);
}

TEST(Smear, ConvolvesOutcomeLaw) {
  gm::testing::Gen g(48);
  for (int t = 0; t < 100; ++t) {
    const int n = g.integer(1, 2);
    const auto obs = g.observable(n, g.integer(1, 3));
    const Matrix w = g.matrix(obs.outcome_dim(), obs.outcome_dim());
    const Matrix c = w * w.transpose();
    const Vector d = g.vector(obs.outcome_dim());
    const auto sm = gm::smear(obs, c, d);
    EXPECT_TRUE(gm::validate_observable(sm).valid);
    const auto s = g.state(n);
    const auto base = gm::pushforward(obs, s);
    const auto out = gm::pushforward(sm, s);
    for (int k = 0; k < 3; ++k) {
      const Vector p = 0.5 * g.vector(obs.outcome_dim());
      const Complex noise = std::exp(Complex(-0.25 * p.dot(c * p), -d.dot(p)));
      EXPECT_NEAR(std::abs(out.characteristic(p) - base.characteristic(p) * noise), 0.0, 1e-12);
    }
  }
}

TEST(MarginalDirection, Examples) {
  const auto qf = gm::q_function(1);
  EXPECT_LT(max_abs_diff(gm::marginal_direction(qf, row2(1, 0)), vec2(0, 1)), 1e-15);
  EXPECT_LT(max_abs_diff(gm::marginal_direction(qf, row2(0, 1)), vec2(-1, 0)), 1e-15);
  EXPECT_EQ(gm::marginal_direction(qf, row2(0, 0)).norm(), 0.0);
  EXPECT_THROW(gm::marginal_direction(q0(), Matrix::Ones(1, 1)), gm::DimensionError);
}

TEST(CanonicalTransform, CovariantStaysCovariant) {
  gm::testing::Gen g(49);
  for (int t = 0; t < 20; ++t) {
    const int n = g.integer(1, 2);
    const Matrix s = g.symplectic(n);
    const auto out = gm::canonical_transform(gm::q_function(n), s);
    EXPECT_LT(max_abs_diff(out.a0(), -gm::omega(n).matrix()), 1e-9);
  }
  EXPECT_THROW(gm::canonical_transform(gm::q_function(1), 2.0 * Matrix::Identity(2, 2)),
               gm::InvalidInputError);
}

TEST(DecomposeCovariant, Examples) {
  const auto dec = gm::decompose_covariant(gm::q_function(1));
  EXPECT_LT(max_abs_diff(dec.p, Matrix::Identity(2, 2)), 1e-15);
  EXPECT_LT(max_abs_diff(dec.noise_c, Matrix::Zero(2, 2)), 1e-12);
  EXPECT_LT(dec.noise_d.norm(), 1e-15);
  ASSERT_EQ(dec.betas.size(), 1u);
  EXPECT_NEAR(dec.betas[0], 1.0, 1e-12);
  // S can differ from I by a symplectic orthogonal factor; it must fix I.
  EXPECT_LT(max_abs_diff(dec.s * dec.s.transpose(), Matrix::Identity(2, 2)), 1e-12);

  const auto sm = gm::smear(gm::q_function(1), 2.0 * Matrix::Identity(2, 2), Vector::Zero(2));
  const auto dec2 = gm::decompose_covariant(sm);
  EXPECT_NEAR(dec2.betas[0], 3.0, 1e-12);
  EXPECT_LT(max_abs_diff(dec2.noise_c, 2.0 * Matrix::Identity(2, 2)), 1e-12);

  EXPECT_THROW(gm::decompose_covariant(q0()), gm::NotInformationallyCompleteError);
}

TEST(DecomposeCovariant, RoundTrip) {
  gm::testing::Gen g(50);
  for (int t = 0; t < 100; ++t) {
    const int n = g.integer(1, 2);
    const auto obs = g.observable(n, 2 * n);
    const auto dec = gm::decompose_covariant(obs);
    for (double b : dec.betas) EXPECT_GE(b, 1.0 - 1e-9);
    EXPECT_TRUE(gm::is_symplectic(dec.s, 1e-8));
    const auto back = gm::recompose(dec);
    EXPECT_LE(max_abs_diff(back.a0(), obs.a0()), 1e-9);
    EXPECT_LE(max_abs_diff(back.b0(), obs.b0()), 1e-9);
    EXPECT_LE(max_abs_diff(back.v0(), obs.v0()), 1e-9);
  }
}

TEST(Sampling, MomentsWithinFiveSigma) {
  gm::testing::Gen g(51);
  const auto dist = gm::pushforward(g.observable(2, 3), g.state(2));
  const std::size_t n = 1'000'000;
  const Matrix draws = gm::sample_outcomes(dist, n, 12345);
  const auto emp = gm::empirical_distribution(draws);
  for (Eigen::Index i = 0; i < dist.mean.size(); ++i) {
    EXPECT_LT(std::abs(emp.mean(i) - dist.mean(i)), 5.0 * std::sqrt(dist.cov(i, i) / n));
    for (Eigen::Index j = 0; j < dist.mean.size(); ++j) {
      const double var = dist.cov(i, i) * dist.cov(j, j) + dist.cov(i, j) * dist.cov(i, j);
      EXPECT_LT(std::abs(emp.cov(i, j) - dist.cov(i, j)), 5.0 * std::sqrt(var / n));
    }
  }
}

TEST(Sampling, SeedDeterminism) {
  const auto dist = gm::pushforward(gm::q_function(1), gm::GaussianState::vacuum(1));
  EXPECT_EQ(max_abs_diff(gm::sample_outcomes(dist, 100, 7), gm::sample_outcomes(dist, 100, 7)), 0.0);
  EXPECT_GT(max_abs_diff(gm::sample_outcomes(dist, 100, 7), gm::sample_outcomes(dist, 100, 8)), 0.0);
  EXPECT_THROW(gm::empirical_distribution(Matrix::Zero(1, 2)), gm::InvalidInputError);
}
