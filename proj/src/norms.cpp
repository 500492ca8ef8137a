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

#include "offsetnav/norms.hpp"

#include <algorithm>

#include "offsetnav/errors.hpp"
#include "offsetnav/kernels.hpp"

namespace offsetnav {

double modality_norm(const WeightW& w) {
  double sum = 0.0;
  for (int i = 0; i < w.layout().modalities(); ++i) sum += w.block_norm(i);
  return sum;
}

double temporal_norm(const WeightU& u) {
  double sum = 0.0;
  for (int k = 0; k < u.layout().history(); ++k) sum += u.block_norm(k);
  return sum;
}

Vector build_q(const WeightW& w, double eps) {
  const auto& layout = w.layout();
  Vector q(layout.feature_dim());
  for (int i = 0; i < layout.modalities(); ++i) {
    const double value = 1.0 / (2.0 * std::max(w.block_norm(i), eps));
    for (int k = 0; k < layout.history(); ++k)
      q.segment(layout.row(k, i, 0), layout.width(i)).setConstant(value);
  }
  return q;
}

Vector build_p(const WeightU& u, double eps) {
  const auto& layout = u.layout();
  const int r = layout.behavior_dim();
  Vector p(layout.difference_dim());
  for (int k = 0; k < layout.history(); ++k)
    p.segment(k * r, r).setConstant(1.0 / (2.0 * std::max(u.block_norm(k), eps)));
  return p;
}

ObjectiveBreakdown objective(const WeightW& w, const WeightU& u, const TrainingSet& data,
                             double lambda1, double lambda2) {
  data.validate();
  if (!(w.layout() == data.layout) || !(u.layout() == data.layout))
    throw DimensionMismatch("weight layout does not match training set layout");
  ObjectiveBreakdown out;
  out.loss = kernels::residual_squared_norm(data.Yhat, w.values(), data.X, u.values(), data.E);
  out.modality_penalty = modality_norm(w);
  out.temporal_penalty = temporal_norm(u);
  out.total = out.loss + lambda1 * out.modality_penalty + lambda2 * out.temporal_penalty;
  return out;
}

}  // namespace offsetnav
