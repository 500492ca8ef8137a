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

// Execution-time behavior generation: the current offset U^T e, the
// predicted future offset, and the final behavior command
//
//   y = W^T x + v_pred + U^T e.

#include <deque>

#include "offsetnav/model.hpp"

namespace offsetnav {

// Rolling window of the last c completed control steps.
class ExecutionState {
 public:
  struct Entry {
    Vector frame;     // feature frame x^(k), length q
    Vector expected;  // expected behavior y^(k), length r
    Vector actual;    // actual behavior yhat^(k), length r
  };

  explicit ExecutionState(ModalityLayout layout);

  // Pushes the newest entry; drops the oldest once c entries are held.
  void push(Vector frame, Vector expected, Vector actual);
  void clear() { entries_.clear(); }

  bool ready() const { return static_cast<int>(entries_.size()) == layout_.history(); }
  int size() const { return static_cast<int>(entries_.size()); }
  // k = 0 is the most recent entry.
  const Entry& entry(int k) const;
  const ModalityLayout& layout() const { return layout_; }

  // Stacked (actual - expected) over the window, most recent first. Missing
  // entries during warm-up are zero.
  Vector differences() const;
  // Stacked (expected - actual): the shortfall the controller must make up.
  Vector shortfall() const { return -differences(); }

 private:
  ModalityLayout layout_;
  std::deque<Entry> entries_;
};

enum class InverseMode {
  kStrict,         // SingularTemporalBlock on a singular U^(k)
  kPseudoInverse,  // Moore-Penrose pseudo-inverse, singular values below the cutoff dropped
};

// Relative cutoff on singular values: a temporal block is singular when its
// smallest singular value is below this fraction of the largest singular value
// over all temporal blocks of U.
inline constexpr double kSingularCutoff = 1e-8;

Vector current_offset(const WeightU& u, const Vector& e);

// Sum over stored entries k of (U^(k)^T)^-1 (y^(k) - W^(k)^T x^(k)), where
// W^(k) are the rows of frame k. Zero until the window is full.
Vector predicted_offset(const WeightW& w, const WeightU& u, const ExecutionState& state,
                        InverseMode mode = InverseMode::kStrict,
                        double relative_cutoff = kSingularCutoff);

Vector generate_behavior(const WeightW& w, const WeightU& u, const FeatureInstance& x,
                         const Vector& e, const Vector& predicted);

}  // namespace offsetnav
