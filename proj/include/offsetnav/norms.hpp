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

// Structured regularizers, their reweighting diagonals, and the full
// doubly-regularized objective.

#include "offsetnav/model.hpp"

namespace offsetnav {

struct ObjectiveBreakdown {
  double loss = 0.0;              // ||Yhat - W^T X - U^T E||_F^2
  double modality_penalty = 0.0;  // sum_i ||W_i||_F
  double temporal_penalty = 0.0;  // sum_k ||U^(k)||_F
  double total = 0.0;             // loss + l1 * modality + l2 * temporal
};

// Sum of Frobenius norms of the modality blocks of W.
double modality_norm(const WeightW& w);
// Sum of Frobenius norms of the r x r temporal blocks of U.
double temporal_norm(const WeightU& u);

// Diagonal of the block-diagonal reweighting matrix Q (length d). Every row of
// modality i, in every frame, gets 1 / (2 max(||W_i||_F, eps)).
Vector build_q(const WeightW& w, double eps);
// Diagonal of P (length r*c): rows of temporal block k get
// 1 / (2 max(||U^(k)||_F, eps)).
Vector build_p(const WeightU& u, double eps);

ObjectiveBreakdown objective(const WeightW& w, const WeightU& u, const TrainingSet& data,
                             double lambda1, double lambda2);

}  // namespace offsetnav
