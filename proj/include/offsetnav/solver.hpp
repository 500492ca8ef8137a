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

#pragma once

// Alternating iteratively-reweighted solver for
//
//   min_{W,U} ||Yhat - W^T X - U^T E||_F^2 + l1 ||W||_M + l2 ||U||_T
//
// Each iteration rebuilds the reweighting diagonal Q from W, solves the
// W-quadratic in closed form, rebuilds P from U and solves the U-quadratic.
// Every W/U update minimizes a majorizer of the objective that is tight at
// the previous iterate, so the objective never increases.

#include <cstdint>
#include <vector>

#include "offsetnav/model.hpp"
#include "offsetnav/norms.hpp"

namespace offsetnav {

struct FitOptions {
  double lambda1 = 0.1;
  double lambda2 = 10.0;
  double eps = 1e-8;     // clamp for zero blocks in Q and P
  double ridge = 1e-10;  // diagonal jitter for the symmetric solves
  double tol = 1e-8;     // relative change of the total objective
  int max_iters = 200;
  std::uint64_t seed = 0;
  bool random_init = false;  // zeros unless set

  // Throws std::invalid_argument.
  void validate() const;
};

struct FitResult {
  WeightW W;
  WeightU U;
  // trace[0] is the objective at the initial point, trace[s] after iteration s.
  std::vector<ObjectiveBreakdown> trace;
  bool converged = false;
  int iterations = 0;
};

// Products of the data matrices that do not change across iterations.
struct NormalEquations {
  Matrix xx;  // X X^T
  Matrix ee;  // E E^T
  Matrix xe;  // X E^T
  Matrix xy;  // X Yhat^T
  Matrix ey;  // E Yhat^T

  static NormalEquations from(const TrainingSet& data);
};

// Solves (X X^T + l1 diag(q) + ridge I) W = X (Yhat - U^T E)^T.
WeightW solve_w(const TrainingSet& data, const WeightU& u, const Vector& q, double lambda1,
                double ridge = 1e-10);
WeightW solve_w(const NormalEquations& ne, const ModalityLayout& layout, const WeightU& u,
                const Vector& q, double lambda1, double ridge);

// Solves (E E^T + l2 diag(p) + ridge I) U = E (Yhat - W^T X)^T.
WeightU solve_u(const TrainingSet& data, const WeightW& w, const Vector& p, double lambda2,
                double ridge = 1e-10);
WeightU solve_u(const NormalEquations& ne, const ModalityLayout& layout, const WeightW& w,
                const Vector& p, double lambda2, double ridge);

FitResult fit(const TrainingSet& data, const FitOptions& opts);

}  // namespace offsetnav
