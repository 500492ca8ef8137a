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

#include "offsetnav/kernels.hpp"

#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "offsetnav/errors.hpp"

namespace offsetnav::kernels {

namespace {

// Columns of `t` are the rows of the original matrix, stored contiguously.
inline double dot_columns(const Matrix& t, Eigen::Index i, const Matrix& s,
                          Eigen::Index j) {
  const double* a = t.col(i).data();
  const double* b = s.col(j).data();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < t.rows(); ++k) acc += a[k] * b[k];
  return acc;
}

// Squared residual norm of one sample column.
inline double column_residual(const Matrix& yhat, const Matrix& w, const Matrix& x,
                              const Matrix& u, const Matrix& e, Eigen::Index col) {
  double sq = 0.0;
  const double* xc = x.col(col).data();
  const double* ec = e.col(col).data();
  for (Eigen::Index j = 0; j < yhat.rows(); ++j) {
    double r = yhat(j, col);
    const double* wj = w.col(j).data();
    for (Eigen::Index i = 0; i < x.rows(); ++i) r -= wj[i] * xc[i];
    const double* uj = u.col(j).data();
    for (Eigen::Index i = 0; i < e.rows(); ++i) r -= uj[i] * ec[i];
    sq += r * r;
  }
  return sq;
}

void check_residual_shapes(const Matrix& yhat, const Matrix& w, const Matrix& x,
                           const Matrix& u, const Matrix& e) {
  const auto n = yhat.cols();
  if (x.cols() != n || e.cols() != n || w.rows() != x.rows() || u.rows() != e.rows() ||
      w.cols() != yhat.rows() || u.cols() != yhat.rows())
    throw DimensionMismatch("residual operands have inconsistent shapes");
}

void check_cross_shapes(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    throw DimensionMismatch("cross product needs equal column counts (" +
                            std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) + ")");
}

}  // namespace

Matrix cross(const Matrix& a, const Matrix& b) {
  check_cross_shapes(a, b);
  const Matrix at = a.transpose();
  const Matrix bt = b.transpose();
  const Eigen::Index p = a.rows();
  const Eigen::Index s = b.rows();
  Matrix out(p, s);
  const long total = static_cast<long>(p * s);
#pragma omp parallel for schedule(static)
  for (long idx = 0; idx < total; ++idx) {
    const Eigen::Index i = idx % p;
    const Eigen::Index j = idx / p;
    out(i, j) = dot_columns(at, i, bt, j);
  }
  return out;
}

Matrix gram(const Matrix& a) {
  const Matrix at = a.transpose();
  const Eigen::Index p = a.rows();
  Matrix out(p, p);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = j; i < p; ++i) {
      const double v = dot_columns(at, i, at, j);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

double residual_squared_norm(const Matrix& yhat, const Matrix& w, const Matrix& x,
                             const Matrix& u, const Matrix& e) {
  check_residual_shapes(yhat, w, x, u, e);
  const long n = static_cast<long>(yhat.cols());
  std::vector<double> partial(static_cast<size_t>(n));
#pragma omp parallel for schedule(static)
  for (long col = 0; col < n; ++col) partial[col] = column_residual(yhat, w, x, u, e, col);
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

namespace serial {

Matrix cross(const Matrix& a, const Matrix& b) {
  check_cross_shapes(a, b);
  const Matrix at = a.transpose();
  const Matrix bt = b.transpose();
  Matrix out(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) out(i, j) = dot_columns(at, i, bt, j);
  return out;
}

Matrix gram(const Matrix& a) {
  const Matrix at = a.transpose();
  Matrix out(a.rows(), a.rows());
  for (Eigen::Index j = 0; j < a.rows(); ++j)
    for (Eigen::Index i = j; i < a.rows(); ++i) {
      const double v = dot_columns(at, i, at, j);
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

double residual_squared_norm(const Matrix& yhat, const Matrix& w, const Matrix& x,
                             const Matrix& u, const Matrix& e) {
  check_residual_shapes(yhat, w, x, u, e);
  double total = 0.0;
  for (Eigen::Index col = 0; col < yhat.cols(); ++col)
    total += column_residual(yhat, w, x, u, e, col);
  return total;
}

}  // namespace serial

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace offsetnav::kernels
