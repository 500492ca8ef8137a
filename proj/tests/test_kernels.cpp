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


#include <random>

#include <gtest/gtest.h>

#include "offsetnav/errors.hpp"
#include "offsetnav/kernels.hpp"

namespace offsetnav {
namespace {

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

TEST(KernelsTest, GramMatchesEigen) {
  const Matrix a = random_matrix(7, 300, 1);
  EXPECT_LT((kernels::gram(a) - a * a.transpose()).norm(), 1e-10 * (a * a.transpose()).norm());
}

TEST(KernelsTest, CrossMatchesEigen) {
  const Matrix a = random_matrix(5, 200, 2), b = random_matrix(3, 200, 3);
  EXPECT_LT((kernels::cross(a, b) - a * b.transpose()).norm(), 1e-10 * (a * b.transpose()).norm());
  EXPECT_THROW(kernels::cross(a, random_matrix(3, 199, 4)), DimensionMismatch);
}

TEST(KernelsTest, ParallelIsBitIdenticalToSerial) {
  for (int n : {1, 17, 1000, 4097}) {
    const Matrix x = random_matrix(12, n, 10 + n), e = random_matrix(6, n, 20 + n);
    const Matrix y = random_matrix(2, n, 30 + n);
    const Matrix w = random_matrix(12, 2, 40), u = random_matrix(6, 2, 50);
    EXPECT_EQ(kernels::gram(x), kernels::serial::gram(x));
    EXPECT_EQ(kernels::cross(x, e), kernels::serial::cross(x, e));
    EXPECT_EQ(kernels::residual_squared_norm(y, w, x, u, e),
              kernels::serial::residual_squared_norm(y, w, x, u, e));
  }
}

TEST(KernelsTest, ResidualNorm) {
  const Matrix x = random_matrix(4, 50, 5), e = random_matrix(2, 50, 6);
  const Matrix w = random_matrix(4, 2, 7), u = random_matrix(2, 2, 8);
  const Matrix y = w.transpose() * x + u.transpose() * e;
  EXPECT_NEAR(kernels::residual_squared_norm(y, w, x, u, e), 0.0, 1e-20);
  const Matrix y2 = y.array() + 1.0;
  EXPECT_NEAR(kernels::residual_squared_norm(y2, w, x, u, e), 100.0, 1e-9);
}

TEST(KernelsTest, GramIsSymmetric) {
  const Matrix g = kernels::gram(random_matrix(9, 333, 9));
  EXPECT_EQ(g, g.transpose());
}

}  // namespace
}  // namespace offsetnav
