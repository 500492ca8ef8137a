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

#include "offsetnav/predictor.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "offsetnav/errors.hpp"

namespace offsetnav {

ExecutionState::ExecutionState(ModalityLayout layout) : layout_(std::move(layout)) {}

void ExecutionState::push(Vector frame, Vector expected, Vector actual) {
  if (frame.size() != layout_.frame_dim() || expected.size() != layout_.behavior_dim() ||
      actual.size() != layout_.behavior_dim())
    throw DimensionMismatch("execution entry does not match the layout");
  entries_.push_front({std::move(frame), std::move(expected), std::move(actual)});
  if (static_cast<int>(entries_.size()) > layout_.history()) entries_.pop_back();
}

const ExecutionState::Entry& ExecutionState::entry(int k) const {
  if (k < 0 || k >= size())
    throw IndexOutOfRange("execution entry " + std::to_string(k) + " not available");
  return entries_[k];
}

Vector ExecutionState::differences() const {
  const int r = layout_.behavior_dim();
  Vector e = Vector::Zero(layout_.difference_dim());
  for (int k = 0; k < size(); ++k) e.segment(k * r, r) = entries_[k].actual - entries_[k].expected;
  return e;
}

Vector current_offset(const WeightU& u, const Vector& e) {
  if (e.size() != u.values().rows())
    throw DimensionMismatch("difference vector length " + std::to_string(e.size()) +
                            " != r*c = " + std::to_string(u.values().rows()));
  return u.values().transpose() * e;
}

Vector predicted_offset(const WeightW& w, const WeightU& u, const ExecutionState& state,
                        InverseMode mode, double relative_cutoff) {
  const auto& layout = state.layout();
  if (!(w.layout() == layout) || !(u.layout() == layout))
    throw DimensionMismatch("weights and execution state disagree on the layout");
  if (!(relative_cutoff >= 0.0)) throw std::invalid_argument("relative cutoff must be >= 0");
  const int r = layout.behavior_dim();
  Vector out = Vector::Zero(r);
  if (!state.ready()) return out;

  const int c = layout.history();
  std::vector<Eigen::JacobiSVD<Matrix>> svds;
  svds.reserve(c);
  double largest = 0.0;
  for (int k = 0; k < c; ++k) {
    svds.emplace_back(u.block(k).transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    largest = std::max(largest, svds.back().singularValues()(0));
  }
  const double cutoff = relative_cutoff * largest;

  for (int k = 0; k < c; ++k) {
    const auto& svd = svds[k];
    const Vector& sv = svd.singularValues();
    if (mode == InverseMode::kStrict && !(sv(r - 1) >= cutoff && sv(r - 1) > 0.0))
      throw SingularTemporalBlock(k, "temporal block " + std::to_string(k) +
                                         " is singular (sigma_min " + std::to_string(sv(r - 1)) +
                                         ", cutoff " + std::to_string(cutoff) + ")");
    const auto& e = state.entry(k);
    const Vector residual = e.expected - w.frame_rows(k).transpose() * e.frame;
    // (U^(k)^T)^+ = V S^+ U^T for U^(k)^T = U S V^T.
    Vector projected = svd.matrixU().transpose() * residual;
    for (int j = 0; j < r; ++j)
      projected(j) = (sv(j) >= cutoff && sv(j) > 0.0) ? projected(j) / sv(j) : 0.0;
    out += svd.matrixV() * projected;
  }
  return out;
}

Vector generate_behavior(const WeightW& w, const WeightU& u, const FeatureInstance& x,
                         const Vector& e, const Vector& predicted) {
  const int r = w.layout().behavior_dim();
  if (x.values.size() != w.values().rows())
    throw DimensionMismatch("feature instance length " + std::to_string(x.values.size()) +
                            " != d = " + std::to_string(w.values().rows()));
  if (predicted.size() != r)
    throw DimensionMismatch("predicted offset must have length r = " + std::to_string(r));
  return w.values().transpose() * x.values + predicted + current_offset(u, e);
}

}  // namespace offsetnav
