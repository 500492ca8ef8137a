// Copyright 2026 The offsetnav Authors
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


#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "offsetnav/errors.hpp"
#include "offsetnav/norms.hpp"

namespace offsetnav {
namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

TEST(ModalityNormTest, Examples) {
  Matrix v(2, 1);
  v << 3, 4;
  EXPECT_DOUBLE_EQ(modality_norm(WeightW(ModalityLayout({2}, 1, 1), v)), 5.0);
  EXPECT_DOUBLE_EQ(modality_norm(WeightW(ModalityLayout({1, 1}, 1, 1), v)), 7.0);
  EXPECT_EQ(modality_norm(WeightW(ModalityLayout({1, 1}, 1, 1))), 0.0);
}

TEST(TemporalNormTest, Examples) {
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  EXPECT_DOUBLE_EQ(temporal_norm(WeightU(ModalityLayout({1}, 1, 2), swap)), std::sqrt(2.0));
  Matrix v(2, 1);
  v << 3, 4;
  EXPECT_DOUBLE_EQ(temporal_norm(WeightU(ModalityLayout({1}, 2, 1), v)), 7.0);
  EXPECT_EQ(temporal_norm(WeightU(ModalityLayout({1}, 3, 2))), 0.0);
}

TEST(NormsTest, HomogeneousAndTriangle) {
  std::mt19937_64 rng(21);
  ModalityLayout l({2, 3}, 3, 2);
  for (int trial = 0; trial < 200; ++trial) {
    WeightW a(l, random_matrix(l.feature_dim(), 2, rng)), b(l, random_matrix(l.feature_dim(), 2, rng));
    WeightU p(l, random_matrix(l.difference_dim(), 2, rng)), q(l, random_matrix(l.difference_dim(), 2, rng));
    const double alpha = std::normal_distribution<double>(0.0, 3.0)(rng);
    EXPECT_NEAR(modality_norm(WeightW(l, alpha * a.values())), std::abs(alpha) * modality_norm(a),
                1e-12 * (1 + modality_norm(a) * std::abs(alpha)));
    EXPECT_NEAR(temporal_norm(WeightU(l, alpha * p.values())), std::abs(alpha) * temporal_norm(p),
                1e-12 * (1 + temporal_norm(p) * std::abs(alpha)));
    EXPECT_LE(modality_norm(WeightW(l, a.values() + b.values())),
              modality_norm(a) + modality_norm(b) + 1e-12);
    EXPECT_LE(temporal_norm(WeightU(l, p.values() + q.values())),
              temporal_norm(p) + temporal_norm(q) + 1e-12);
    EXPECT_GE(modality_norm(a), 0.0);
    EXPECT_GE(temporal_norm(p), 0.0);
  }
}

TEST(BuildQTest, Examples) {
  Matrix v(2, 1);
  v << 3, 4;
  const Vector q1 = build_q(WeightW(ModalityLayout({2}, 1, 1), v), 1e-8);
  EXPECT_DOUBLE_EQ(q1(0), 0.1);
  EXPECT_DOUBLE_EQ(q1(1), 0.1);

  const Vector q0 = build_q(WeightW(ModalityLayout({2}, 1, 1)), 1e-8);
  EXPECT_DOUBLE_EQ(q0(0), 1.0 / 2e-8);

  Matrix w(3, 1);
  w << 1, 2, 0;  // block 1 = [1], block 2 = [2; 0]
  const Vector q2 = build_q(WeightW(ModalityLayout({1, 2}, 1, 1), w), 1e-8);
  EXPECT_DOUBLE_EQ(q2(0), 0.5);
  EXPECT_DOUBLE_EQ(q2(1), 0.25);
  EXPECT_DOUBLE_EQ(q2(2), 0.25);
}

TEST(BuildQTest, SpansEveryFrame) {
  ModalityLayout l({1, 2}, 3, 1);
  WeightW w(l);
  w.set_block(0, Matrix::Constant(3, 1, 1.0));  // norm sqrt(3)
  w.set_block(1, Matrix::Constant(6, 1, 2.0));  // norm sqrt(24)
  const Vector q = build_q(w, 1e-8);
  for (int k = 0; k < 3; ++k) {
    EXPECT_DOUBLE_EQ(q(l.row(k, 0, 0)), 1.0 / (2.0 * std::sqrt(3.0)));
    EXPECT_DOUBLE_EQ(q(l.row(k, 1, 1)), 1.0 / (2.0 * std::sqrt(24.0)));
  }
}

TEST(BuildPTest, Examples) {
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  const Vector p = build_p(WeightU(ModalityLayout({1}, 1, 2), swap), 1e-8);
  EXPECT_DOUBLE_EQ(p(0), 1.0 / (2.0 * std::sqrt(2.0)));
  EXPECT_DOUBLE_EQ(p(1), 1.0 / (2.0 * std::sqrt(2.0)));

  EXPECT_DOUBLE_EQ(build_p(WeightU(ModalityLayout({1}, 2, 2)), 1e-8)(3), 1.0 / 2e-8);

  Matrix u(2, 1);
  u << 2, 4;
  const Vector p2 = build_p(WeightU(ModalityLayout({1}, 2, 1), u), 1e-8);
  EXPECT_DOUBLE_EQ(p2(0), 0.25);
  EXPECT_DOUBLE_EQ(p2(1), 0.125);
}

TEST(BuildQTest, TraceIdentity) {
  std::mt19937_64 rng(5);
  ModalityLayout l({2, 1, 3}, 2, 2);
  for (int trial = 0; trial < 50; ++trial) {
    WeightW w(l, random_matrix(l.feature_dim(), 2, rng));
    const Vector q = build_q(w, 1e-8);
    const double tr = (w.values().transpose() * q.asDiagonal() * w.values()).trace();
    EXPECT_NEAR(tr, modality_norm(w) / 2.0, 1e-10 * modality_norm(w));
  }
}

// Direct element-by-element evaluation used as an independent reference.
double naive_objective(const Matrix& w, const Matrix& u, const TrainingSet& data,
                       const ModalityLayout& l, double l1, double l2) {
  double loss = 0.0;
  for (int s = 0; s < data.samples(); ++s) {
    for (int j = 0; j < l.behavior_dim(); ++j) {
      double pred = 0.0;
      for (int i = 0; i < l.feature_dim(); ++i) pred += w(i, j) * data.X(i, s);
      for (int i = 0; i < l.difference_dim(); ++i) pred += u(i, j) * data.E(i, s);
      const double diff = data.Yhat(j, s) - pred;
      loss += diff * diff;
    }
  }
  double mod = 0.0;
  for (int m = 0; m < l.modalities(); ++m) {
    double sq = 0.0;
    for (int k = 0; k < l.history(); ++k)
      for (int f = 0; f < l.width(m); ++f)
        for (int j = 0; j < l.behavior_dim(); ++j) sq += std::pow(w(l.row(k, m, f), j), 2);
    mod += std::sqrt(sq);
  }
  double tem = 0.0;
  for (int k = 0; k < l.history(); ++k) {
    double sq = 0.0;
    for (int a = 0; a < l.behavior_dim(); ++a)
      for (int j = 0; j < l.behavior_dim(); ++j) sq += std::pow(u(k * l.behavior_dim() + a, j), 2);
    tem += std::sqrt(sq);
  }
  return loss + l1 * mod + l2 * tem;
}

TEST(ObjectiveTest, MatchesNaiveSummation) {
  std::mt19937_64 rng(2026);
  // d = 4 (m = 2 widths {1,1}, c = 2), n = 6, r = 2.
  ModalityLayout l({1, 1}, 2, 2);
  TrainingSet data{l, random_matrix(4, 6, rng), random_matrix(2, 6, rng), random_matrix(2, 6, rng),
                   random_matrix(4, 6, rng)};
  const Matrix w = random_matrix(4, 2, rng), u = random_matrix(4, 2, rng);
  const auto b = objective(WeightW(l, w), WeightU(l, u), data, 0.7, 1.3);
  const double ref = naive_objective(w, u, data, l, 0.7, 1.3);
  EXPECT_NEAR(b.total, ref, 1e-12 * ref);
  EXPECT_DOUBLE_EQ(b.total, b.loss + 0.7 * b.modality_penalty + 1.3 * b.temporal_penalty);
}

TEST(ObjectiveTest, PerfectFitAndZeroWeights) {
  std::mt19937_64 rng(8);
  ModalityLayout l({2}, 2, 2);
  const Matrix x = random_matrix(4, 9, rng), e = random_matrix(4, 9, rng);
  const Matrix w = random_matrix(4, 2, rng), u = random_matrix(4, 2, rng);
  TrainingSet data{l, x, Matrix::Zero(2, 9), w.transpose() * x + u.transpose() * e, e};
  EXPECT_NEAR(objective(WeightW(l, w), WeightU(l, u), data, 0, 0).total, 0.0, 1e-20);

  const auto z = objective(WeightW(l), WeightU(l), data, 3.0, 4.0);
  EXPECT_NEAR(z.loss, data.Yhat.squaredNorm(), 1e-12 * z.loss);
  EXPECT_EQ(z.modality_penalty, 0.0);
  EXPECT_EQ(z.temporal_penalty, 0.0);
}

TEST(ObjectiveTest, DimensionMismatch) {
  ModalityLayout l({2}, 2, 2), other({3}, 2, 2);
  TrainingSet data{l, Matrix::Zero(4, 3), Matrix::Zero(2, 3), Matrix::Zero(2, 3), Matrix::Zero(4, 3)};
  EXPECT_THROW(objective(WeightW(other), WeightU(l), data, 0, 0), DimensionMismatch);
}

// ||b|| - ||b||^2 / (2||a||) <= ||a|| - ||a||^2 / (2||a||) for nonzero a.
TEST(MajorizerTest, VectorInequality) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> dim(1, 12);
  std::lognormal_distribution<double> scale(0.0, 2.0);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dim(rng);
    const Vector a = random_matrix(n, 1, rng) * scale(rng);
    const Vector b = random_matrix(n, 1, rng) * scale(rng);
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0) continue;
    if (nb - nb * nb / (2 * na) > na - na * na / (2 * na) + 1e-12) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

TEST(MajorizerTest, MatrixInequality) {
  std::mt19937_64 rng(100);
  std::uniform_int_distribution<int> dim(1, 6);
  std::lognormal_distribution<double> scale(0.0, 2.0);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int r = dim(rng), c = dim(rng);
    const Matrix a = random_matrix(r, c, rng) * scale(rng);
    const Matrix b = random_matrix(r, c, rng) * scale(rng);
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0) continue;
    if (nb - nb * nb / (2 * na) > na - na * na / (2 * na) + 1e-12) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

}  // namespace
}  // namespace offsetnav
