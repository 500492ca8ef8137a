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

#include "offsetnav/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "offsetnav/errors.hpp"
#include "offsetnav/kernels.hpp"

namespace offsetnav {

namespace {

Matrix solve_spd(Matrix a, const Vector& diagonal, const Matrix& rhs, const char* what) {
  a.diagonal() += diagonal;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw SingularSystem(std::string(what) + ": normal equations are not positive definite");
  Matrix x = llt.solve(rhs);
  if (!x.allFinite())
    throw SingularSystem(std::string(what) + ": solve produced non-finite weights");
  return x;
}

bool finite(const ObjectiveBreakdown& o) {
  return std::isfinite(o.loss) && std::isfinite(o.modality_penalty) &&
         std::isfinite(o.temporal_penalty) && std::isfinite(o.total);
}

}  // namespace

void FitOptions::validate() const {
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0))
    throw std::invalid_argument("lambda1 and lambda2 must be >= 0");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  if (!(ridge >= 0.0)) throw std::invalid_argument("ridge must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
}

NormalEquations NormalEquations::from(const TrainingSet& data) {
  data.validate();
  return {kernels::gram(data.X), kernels::gram(data.E), kernels::cross(data.X, data.E),
          kernels::cross(data.X, data.Yhat), kernels::cross(data.E, data.Yhat)};
}

WeightW solve_w(const NormalEquations& ne, const ModalityLayout& layout, const WeightU& u,
                const Vector& q, double lambda1, double ridge) {
  if (q.size() != layout.feature_dim() || u.values().rows() != layout.difference_dim())
    throw DimensionMismatch("solve_w: Q or U does not match the layout");
  const Matrix rhs = ne.xy - ne.xe * u.values();
  Vector diag = lambda1 * q;
  diag.array() += ridge;
  return WeightW(layout, solve_spd(ne.xx, diag, rhs, "solve_w"));
}

WeightW solve_w(const TrainingSet& data, const WeightU& u, const Vector& q, double lambda1,
                double ridge) {
  return solve_w(NormalEquations::from(data), data.layout, u, q, lambda1, ridge);
}

WeightU solve_u(const NormalEquations& ne, const ModalityLayout& layout, const WeightW& w,
                const Vector& p, double lambda2, double ridge) {
  if (p.size() != layout.difference_dim() || w.values().rows() != layout.feature_dim())
    throw DimensionMismatch("solve_u: P or W does not match the layout");
  const Matrix rhs = ne.ey - ne.xe.transpose() * w.values();
  Vector diag = lambda2 * p;
  diag.array() += ridge;
  return WeightU(layout, solve_spd(ne.ee, diag, rhs, "solve_u"));
}

WeightU solve_u(const TrainingSet& data, const WeightW& w, const Vector& p, double lambda2,
                double ridge) {
  return solve_u(NormalEquations::from(data), data.layout, w, p, lambda2, ridge);
}

FitResult fit(const TrainingSet& data, const FitOptions& opts) {
  opts.validate();
  data.validate();
  const auto& layout = data.layout;
  const NormalEquations ne = NormalEquations::from(data);

  FitResult result{WeightW(layout), WeightU(layout), {}, false, 0};
  if (opts.random_init) {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal(0.0, 0.01);
    for (double& v : result.W.values().reshaped()) v = normal(rng);
    for (double& v : result.U.values().reshaped()) v = normal(rng);
  }

  auto evaluate = [&] {
    ObjectiveBreakdown o = objective(result.W, result.U, data, opts.lambda1, opts.lambda2);
    if (!finite(o))
      throw NonFiniteObjective("objective is not finite after iteration " +
                               std::to_string(result.trace.size()));
    result.trace.push_back(o);
  };
  evaluate();

  for (int it = 0; it < opts.max_iters; ++it) {
    const Vector q = build_q(result.W, opts.eps);
    result.W = solve_w(ne, layout, result.U, q, opts.lambda1, opts.ridge);
    const Vector p = build_p(result.U, opts.eps);
    result.U = solve_u(ne, layout, result.W, p, opts.lambda2, opts.ridge);
    evaluate();

    const double prev = result.trace[result.trace.size() - 2].total;
    const double cur = result.trace.back().total;
    if (std::abs(prev - cur) / std::max(prev, 1e-12) < opts.tol) {
      result.converged = true;
      break;
    }
  }
  result.iterations = static_cast<int>(result.trace.size()) - 1;
  return result;
}

}  // namespace offsetnav
