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

// Independent joint solver for the doubly-regularized objective: proximal
// gradient on the stacked variable [W; U] with group soft-thresholding of
// every modality block and every temporal block. Used to certify that the
// alternating solver reaches the global optimum; not tuned for speed.

#include <vector>

#include "offsetnav/model.hpp"

namespace offsetnav {

struct OracleOptions {
  enum class StepRule { kFixed, kBacktracking };

  StepRule step_rule = StepRule::kFixed;
  // Nesterov momentum with function-value restart. Restarted steps are plain
  // proximal-gradient steps, so the accepted objective stays non-increasing.
  bool accelerated = true;
  int max_iters = 50000;
  double tol = 1e-10;  // relative objective change

  void validate() const;
};

struct OracleResult {
  WeightW W;
  WeightU U;
  double objective = 0.0;
  std::vector<double> trace;  // objective per accepted iterate, trace[0] at zero
  int iterations = 0;
};

// max(0, 1 - threshold / ||block||_F) * block.
Matrix group_prox(const Matrix& block, double threshold);

// 2 * sigma_max([X; E])^2 from power iteration, inflated by 1%.
double lipschitz_bound(const TrainingSet& data);

// Throws NotConverged when max_iters is reached before the stopping rule.
OracleResult oracle_fit(const TrainingSet& data, double lambda1, double lambda2,
                        const OracleOptions& opts = {});

}  // namespace offsetnav
