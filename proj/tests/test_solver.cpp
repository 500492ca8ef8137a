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
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "offsetnav/errors.hpp"
#include "offsetnav/solver.hpp"
#include "test_support.hpp"

namespace offsetnav {
namespace {

using testing::gaussian;
using testing::random_problem;

// Conjugate gradient on (A + diag(reg)) x = b with A applied as X X^T
// through explicit loops; independent of the Cholesky path in the solver.
Matrix cg_solve(const Matrix& feats, const Vector& reg, const Matrix& rhs) {
  const Eigen::Index d = feats.rows(), n = feats.cols();
  auto apply = [&](const Vector& v) {
    Vector out = reg.cwiseProduct(v);
    for (Eigen::Index s = 0; s < n; ++s) {
      double dot = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) dot += feats(i, s) * v(i);
      for (Eigen::Index i = 0; i < d; ++i) out(i) += feats(i, s) * dot;
    }
    return out;
  };
  Matrix x = Matrix::Zero(d, rhs.cols());
  for (Eigen::Index col = 0; col < rhs.cols(); ++col) {
    Vector xi = Vector::Zero(d), res = rhs.col(col), dir = res;
    double rs = res.squaredNorm();
    for (int it = 0; it < 10 * d && std::sqrt(rs) > 1e-14 * rhs.col(col).norm(); ++it) {
      const Vector ad = apply(dir);
      const double alpha = rs / dir.dot(ad);
      xi += alpha * dir;
      res -= alpha * ad;
      const double next = res.squaredNorm();
      dir = res + (next / rs) * dir;
      rs = next;
    }
    x.col(col) = xi;
  }
  return x;
}

TEST(SolveWTest, InterpolatesWithIdentityFeatures) {
  ModalityLayout l({2, 1}, 2, 2);  // d = 6
  std::mt19937_64 rng(1);
  TrainingSet data{l, Matrix::Identity(6, 6), gaussian(2, 6, rng), gaussian(2, 6, rng),
                   gaussian(4, 6, rng)};
  const WeightW w = solve_w(data, WeightU(l), Vector::Ones(6), 0.0);
  EXPECT_LT((w.values() - data.Yhat.transpose()).norm(), 1e-8);
}

TEST(SolveWTest, ZeroTargetGivesZero) {
  ModalityLayout l({2}, 2, 2);
  std::mt19937_64 rng(2);
  const Matrix e = gaussian(4, 10, rng);
  WeightU u(l, gaussian(4, 2, rng));
  TrainingSet data{l, gaussian(4, 10, rng), Matrix::Zero(2, 10), u.values().transpose() * e, e};
  const WeightW w = solve_w(data, u, Vector::Constant(4, 0.3), 1.0);
  EXPECT_LT(w.values().norm(), 1e-12);
}

TEST(SolveWTest, MatchesConjugateGradient) {
  ModalityLayout l({2, 1}, 2, 2);  // d = 6
  auto p = random_problem(l, 20, 3);
  std::mt19937_64 rng(4);
  WeightU u(l, gaussian(4, 2, rng));
  const Vector q = gaussian(6, 1, rng).cwiseAbs();
  const double lambda1 = 0.7;
  const WeightW w = solve_w(p.data, u, q, lambda1);
  const Matrix rhs = p.data.X * (p.data.Yhat - u.values().transpose() * p.data.E).transpose();
  const Matrix ref = cg_solve(p.data.X, lambda1 * q, rhs);
  EXPECT_LT((w.values() - ref).norm(), 1e-6 * ref.norm());
}

TEST(SolveWTest, ZeroGradientOfSurrogate) {
  ModalityLayout l({1, 2}, 3, 2);
  auto p = random_problem(l, 40, 5);
  std::mt19937_64 rng(6);
  WeightU u(l, gaussian(6, 2, rng));
  const Vector q = gaussian(9, 1, rng).cwiseAbs();
  const WeightW w = solve_w(p.data, u, q, 2.0);
  const Matrix resid = p.data.Yhat - w.values().transpose() * p.data.X - u.values().transpose() * p.data.E;
  const Matrix grad = -2.0 * p.data.X * resid.transpose() + 2.0 * 2.0 * q.asDiagonal() * w.values();
  EXPECT_LT(grad.norm(), 1e-6 * (2.0 * p.data.X * p.data.Yhat.transpose()).norm());
}

TEST(SolveUTest, InterpolatesWithSquareDifferences) {
  ModalityLayout l({1}, 2, 2);  // rc = 4
  std::mt19937_64 rng(7);
  const Matrix e = gaussian(4, 4, rng);
  TrainingSet data{l, gaussian(2, 4, rng), Matrix::Zero(2, 4), gaussian(2, 4, rng), e};
  const WeightU u = solve_u(data, WeightW(l), Vector::Ones(4), 0.0);
  EXPECT_LT((u.values().transpose() * e - data.Yhat).norm(), 1e-8);
}

TEST(SolveUTest, ZeroTargetGivesZero) {
  ModalityLayout l({3}, 1, 2);
  std::mt19937_64 rng(8);
  const Matrix x = gaussian(3, 12, rng);
  WeightW w(l, gaussian(3, 2, rng));
  TrainingSet data{l, x, Matrix::Zero(2, 12), w.values().transpose() * x, gaussian(2, 12, rng)};
  EXPECT_LT(solve_u(data, w, Vector::Constant(2, 0.5), 3.0).values().norm(), 1e-12);
}

TEST(SolveUTest, MatchesConjugateGradient) {
  ModalityLayout l({2}, 3, 2);
  auto p = random_problem(l, 25, 9);
  std::mt19937_64 rng(10);
  WeightW w(l, gaussian(6, 2, rng));
  const Vector pd = gaussian(6, 1, rng).cwiseAbs();
  const WeightU u = solve_u(p.data, w, pd, 1.5);
  const Matrix rhs = p.data.E * (p.data.Yhat - w.values().transpose() * p.data.X).transpose();
  const Matrix ref = cg_solve(p.data.E, 1.5 * pd, rhs);
  EXPECT_LT((u.values() - ref).norm(), 1e-6 * ref.norm());
}

TEST(SolveTest, ShapeErrors) {
  ModalityLayout l({2}, 2, 2);
  auto p = random_problem(l, 10, 11);
  EXPECT_THROW(solve_w(p.data, WeightU(l), Vector::Ones(3), 1.0), DimensionMismatch);
  EXPECT_THROW(solve_u(p.data, WeightW(l), Vector::Ones(3), 1.0), DimensionMismatch);
}

TEST(SolveTest, SingularSystemWithoutRidge) {
  ModalityLayout l({2}, 1, 1);
  TrainingSet data{l, Matrix::Zero(2, 3), Matrix::Zero(1, 3), Matrix::Ones(1, 3), Matrix::Zero(1, 3)};
  EXPECT_THROW(solve_w(data, WeightU(l), Vector::Zero(2), 0.0, 0.0), SingularSystem);
  EXPECT_NO_THROW(solve_w(data, WeightU(l), Vector::Zero(2), 0.0, 1e-10));
}

TEST(FitOptionsTest, Validation) {
  FitOptions o;
  EXPECT_NO_THROW(o.validate());
  o.tol = 0.0;
  EXPECT_THROW(o.validate(), std::invalid_argument);
  o = FitOptions{};
  o.max_iters = 0;
  EXPECT_THROW(o.validate(), std::invalid_argument);
  o = FitOptions{};
  o.lambda2 = -1.0;
  EXPECT_THROW(o.validate(), std::invalid_argument);
}

TEST(FitTest, NoiselessUnregularizedRecovery) {
  ModalityLayout l({2, 1}, 2, 2);
  auto p = random_problem(l, 60, 12, 0.0);
  FitOptions o;
  o.lambda1 = o.lambda2 = 0.0;
  const FitResult f = fit(p.data, o);
  EXPECT_LE(f.trace.back().total, 1e-10 * f.trace.front().total);
  const Matrix pred = f.W.values().transpose() * p.data.X + f.U.values().transpose() * p.data.E;
  EXPECT_LT((pred - p.data.Yhat).norm(), 1e-6 * p.data.Yhat.norm());
}

TEST(FitTest, TraceStartsAtZeroWeights) {
  ModalityLayout l({2}, 2, 2);
  auto p = random_problem(l, 30, 13);
  const FitResult f = fit(p.data, FitOptions{});
  EXPECT_DOUBLE_EQ(f.trace.front().total, p.data.Yhat.squaredNorm());
  EXPECT_EQ(f.iterations + 1, static_cast<int>(f.trace.size()));
}

TEST(FitTest, MonotoneDescent) {
  int instance = 0;
  for (double l1 : {0.0, 0.1, 1.0, 10.0}) {
    for (double l2 : {0.0, 0.1, 1.0, 10.0}) {
      ModalityLayout l({1, 2, 2}, 3, 2);
      auto p = random_problem(l, 50, 100 + instance++, 0.3);
      FitOptions o;
      o.lambda1 = l1;
      o.lambda2 = l2;
      const FitResult f = fit(p.data, o);
      for (std::size_t s = 1; s < f.trace.size(); ++s)
        EXPECT_LE(f.trace[s].total, f.trace[s - 1].total + 1e-10) << "l1=" << l1 << " l2=" << l2;
    }
  }
}

TEST(FitTest, DeterministicBitForBit) {
  ModalityLayout l({2, 2}, 3, 2);
  auto p = random_problem(l, 80, 14);
  FitOptions o;
  o.random_init = true;
  o.seed = 77;
  const FitResult a = fit(p.data, o), b = fit(p.data, o);
  EXPECT_EQ(a.W.values(), b.W.values());
  EXPECT_EQ(a.U.values(), b.U.values());
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t s = 0; s < a.trace.size(); ++s) EXPECT_EQ(a.trace[s].total, b.trace[s].total);
}

TEST(FitTest, RandomInitReachesSameOptimum) {
  ModalityLayout l({2, 1}, 2, 2);
  auto p = random_problem(l, 60, 15);
  FitOptions o;
  o.lambda1 = 1.0;
  o.lambda2 = 1.0;
  o.tol = 1e-12;
  o.max_iters = 2000;
  const double zero = fit(p.data, o).trace.back().total;
  o.random_init = true;
  o.seed = 3;
  const double random = fit(p.data, o).trace.back().total;
  EXPECT_NEAR(zero, random, 1e-7 * zero);
}

TEST(FitTest, StationaryAtConvergence) {
  ModalityLayout l({2, 1}, 3, 2);
  auto p = random_problem(l, 120, 16);
  FitOptions o;
  o.lambda1 = 0.5;
  o.lambda2 = 0.5;
  o.tol = 1e-14;
  o.max_iters = 5000;
  const FitResult f = fit(p.data, o);
  const Vector q = build_q(f.W, o.eps), pd = build_p(f.U, o.eps);
  const Matrix resid = p.data.Yhat - f.W.values().transpose() * p.data.X -
                       f.U.values().transpose() * p.data.E;
  const Matrix gw = -2.0 * p.data.X * resid.transpose() + 2.0 * o.lambda1 * q.asDiagonal() * f.W.values();
  const Matrix gu = -2.0 * p.data.E * resid.transpose() + 2.0 * o.lambda2 * pd.asDiagonal() * f.U.values();
  EXPECT_LE(gw.cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_LE(gu.cwiseAbs().maxCoeff(), 1e-5);
}

TEST(FitTest, SilentModalityIsZeroed) {
  ModalityLayout l({3, 3, 3}, 2, 2);
  auto p = random_problem(l, 200, 17, 0.1, {1});
  FitOptions o;
  o.lambda1 = 10.0;
  o.lambda2 = 0.1;
  const FitResult f = fit(p.data, o);
  EXPECT_LT(f.W.block_norm(1), 0.05 * f.W.block_norm(0));
  EXPECT_LT(f.W.block_norm(1), 0.05 * f.W.block_norm(2));
}

TEST(FitTest, HugeTemporalWeightKillsU) {
  ModalityLayout l({2}, 3, 2);
  auto p = random_problem(l, 60, 18);
  FitOptions o;
  o.lambda2 = 1e6;
  const FitResult f = fit(p.data, o);
  EXPECT_LT(f.U.values().norm(), 1e-6);
}

TEST(FitTest, NonFiniteData) {
  ModalityLayout l({2}, 1, 1);
  auto p = random_problem(l, 10, 19);
  p.data.Yhat(0, 3) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(fit(p.data, FitOptions{}), NumericalError);
}

TEST(FitTest, ThreeBehaviorChannels) {
  // d = 30 (widths {2,2,2}, c = 5), n = 100, r = 3.
  ModalityLayout l({2, 2, 2}, 5, 3);
  auto p = random_problem(l, 100, 20, 0.2);
  const FitResult f = fit(p.data, FitOptions{});
  EXPECT_TRUE(f.converged);
  EXPECT_LE(f.iterations, 100);
}

}  // namespace
}  // namespace offsetnav
