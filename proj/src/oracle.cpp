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

#include "offsetnav/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "offsetnav/errors.hpp"
#include "offsetnav/kernels.hpp"
#include "offsetnav/norms.hpp"

namespace offsetnav {

namespace {

// Smooth part in Gram form: f(Z) = ||Yhat||^2 - 2<Z, B> + <Z, G Z>.
struct StackedProblem {
  ModalityLayout layout;
  Matrix gram;  // A A^T with A = [X; E]
  Matrix rhs;   // A Yhat^T
  double yy = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  double smooth(const Matrix& z, const Matrix& gz) const {
    return yy - 2.0 * (z.array() * rhs.array()).sum() + (z.array() * gz.array()).sum();
  }

  double penalty(const Matrix& z) const {
    const int d = layout.feature_dim();
    const WeightW w(layout, z.topRows(d));
    const WeightU u(layout, z.bottomRows(layout.difference_dim()));
    return lambda1 * modality_norm(w) + lambda2 * temporal_norm(u);
  }

  Matrix prox(const Matrix& z, double step) const {
    const int d = layout.feature_dim();
    WeightW w(layout, z.topRows(d));
    WeightU u(layout, z.bottomRows(layout.difference_dim()));
    for (int i = 0; i < layout.modalities(); ++i)
      w.set_block(i, group_prox(w.block(i), step * lambda1));
    for (int k = 0; k < layout.history(); ++k)
      u.set_block(k, group_prox(u.block(k), step * lambda2));
    Matrix out(z.rows(), z.cols());
    out.topRows(d) = w.values();
    out.bottomRows(layout.difference_dim()) = u.values();
    return out;
  }
};

StackedProblem stack(const TrainingSet& data, double lambda1, double lambda2) {
  const int d = data.layout.feature_dim();
  const int rc = data.layout.difference_dim();
  StackedProblem p{data.layout, Matrix(d + rc, d + rc), Matrix(d + rc, data.layout.behavior_dim()),
                   data.Yhat.squaredNorm(), lambda1, lambda2};
  p.gram.topLeftCorner(d, d) = kernels::gram(data.X);
  p.gram.bottomRightCorner(rc, rc) = kernels::gram(data.E);
  p.gram.topRightCorner(d, rc) = kernels::cross(data.X, data.E);
  p.gram.bottomLeftCorner(rc, d) = p.gram.topRightCorner(d, rc).transpose();
  p.rhs.topRows(d) = kernels::cross(data.X, data.Yhat);
  p.rhs.bottomRows(rc) = kernels::cross(data.E, data.Yhat);
  return p;
}

double power_iteration(const Matrix& g) {
  Vector v = Vector::Ones(g.rows()) / std::sqrt(static_cast<double>(g.rows()));
  double lambda = 0.0;
  for (int it = 0; it < 1000; ++it) {
    Vector next = g * v;
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    next /= norm;
    const double delta = std::abs(norm - lambda);
    lambda = norm;
    v = next;
    if (delta <= 1e-12 * lambda) break;
  }
  return lambda;
}

}  // namespace

void OracleOptions::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("oracle tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("oracle max_iters must be >= 1");
}

Matrix group_prox(const Matrix& block, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("group_prox threshold must be >= 0");
  const double norm = block.norm();
  if (norm <= threshold) return Matrix::Zero(block.rows(), block.cols());
  return (1.0 - threshold / norm) * block;
}

double lipschitz_bound(const TrainingSet& data) {
  data.validate();
  const StackedProblem p = stack(data, 0.0, 0.0);
  return 2.0 * power_iteration(p.gram) * 1.01;
}

OracleResult oracle_fit(const TrainingSet& data, double lambda1, double lambda2,
                        const OracleOptions& opts) {
  opts.validate();
  data.validate();
  if (lambda1 < 0.0 || lambda2 < 0.0) throw std::invalid_argument("lambdas must be >= 0");
  const StackedProblem prob = stack(data, lambda1, lambda2);
  const auto rows = prob.gram.rows();
  const auto cols = prob.rhs.cols();

  double lipschitz = 2.0 * power_iteration(prob.gram) * 1.01;
  if (lipschitz <= 0.0) lipschitz = 1.0;
  const bool backtracking = opts.step_rule == OracleOptions::StepRule::kBacktracking;
  if (backtracking) lipschitz = std::max(lipschitz * 1e-3, 1e-12);

  auto full = [&](const Matrix& z) {
    const Matrix gz = prob.gram * z;
    return prob.smooth(z, gz) + prob.penalty(z);
  };

  // One proximal-gradient step from `y`; updates `lipschitz` under backtracking.
  auto step_from = [&](const Matrix& y) {
    const Matrix gy = prob.gram * y;
    const Matrix grad = 2.0 * (gy - prob.rhs);
    if (!backtracking) return prob.prox(y - grad / lipschitz, 1.0 / lipschitz);
    const double fy = prob.smooth(y, gy);
    for (int tries = 0; tries < 200; ++tries) {
      Matrix z = prob.prox(y - grad / lipschitz, 1.0 / lipschitz);
      const Matrix diff = z - y;
      const double model = fy + (diff.array() * grad.array()).sum() +
                           0.5 * lipschitz * diff.squaredNorm();
      if (prob.smooth(z, prob.gram * z) <= model * (1.0 + 1e-15) + 1e-300) return z;
      lipschitz *= 2.0;
    }
    throw NotConverged("oracle backtracking failed to find a step");
  };

  Matrix x = Matrix::Zero(rows, cols);
  Matrix y = x;
  double t = 1.0;
  double fx = full(x);
  OracleResult result{WeightW(data.layout), WeightU(data.layout), fx, {fx}, 0};

  bool converged = false;
  int calm = 0;
  for (int it = 0; it < opts.max_iters; ++it) {
    Matrix z = step_from(y);
    double fz = full(z);
    if (opts.accelerated && fz > fx) {
      // Function-value restart: drop momentum and take a plain step from x.
      t = 1.0;
      z = step_from(x);
      fz = full(z);
    }
    if (fz > fx) {
      // Only reachable through rounding; keep the better iterate.
      z = x;
      fz = fx;
    }
    const double change = std::abs(fx - fz) / std::max(std::abs(fx), 1e-12);
    if (opts.accelerated) {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = z + ((t - 1.0) / t_next) * (z - x);
      t = t_next;
    } else {
      y = z;
    }
    x = std::move(z);
    fx = fz;
    result.trace.push_back(fx);
    result.iterations = it + 1;
    calm = change < opts.tol ? calm + 1 : 0;
    if (calm >= 3) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NotConverged("oracle did not reach relative change " + std::to_string(opts.tol) +
                       " within " + std::to_string(opts.max_iters) + " iterations");

  const int d = data.layout.feature_dim();
  result.W = WeightW(data.layout, x.topRows(d));
  result.U = WeightU(data.layout, x.bottomRows(data.layout.difference_dim()));
  result.objective = objective(result.W, result.U, data, lambda1, lambda2).total;
  return result;
}

}  // namespace offsetnav
