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

// Block-structured data model shared by every other module.
//
// A feature instance stacks c frames, most recent first; each frame is the
// concatenation of m modalities in layout order. Row index of feature f of
// modality i in frame k is therefore k*q + offset(i) + f.

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace offsetnav {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class ModalityLayout {
 public:
  ModalityLayout() = default;
  // Throws DimensionMismatch when any count is < 1.
  ModalityLayout(std::vector<int> widths, int history, int behavior_dim);

  int modalities() const { return static_cast<int>(widths_.size()); }
  const std::vector<int>& widths() const { return widths_; }
  int width(int modality) const;
  int history() const { return history_; }        // c
  int behavior_dim() const { return behavior_dim_; }  // r
  int frame_dim() const { return frame_dim_; }     // q
  int feature_dim() const { return history_ * frame_dim_; }  // d
  int difference_dim() const { return history_ * behavior_dim_; }  // r*c

  // Offset of modality `modality` inside a single frame.
  int modality_offset(int modality) const;
  // Row of feature `f` of `modality` in frame `frame` of a stacked instance.
  int row(int frame, int modality, int f) const;

  bool operator==(const ModalityLayout&) const = default;

 private:
  std::vector<int> widths_;
  std::vector<int> offsets_;
  int history_ = 0;
  int behavior_dim_ = 0;
  int frame_dim_ = 0;
};

struct FeatureInstance {
  Vector values;  // length d

  // Splits back into c frames of length q, most recent first.
  std::vector<Vector> frames(const ModalityLayout& layout) const;
};

FeatureInstance build_instance(std::span<const Vector> frames,
                               const ModalityLayout& layout);

// Block k of the result is actual[k] - expected[k].
Vector build_differences(std::span<const Vector> expected,
                         std::span<const Vector> actual,
                         const ModalityLayout& layout);

struct TrainingSet {
  ModalityLayout layout;
  Matrix X;     // d x n
  Matrix Y;     // r x n, expected behaviors
  Matrix Yhat;  // r x n, actual behaviors
  Matrix E;     // (r*c) x n, behavior differences

  int samples() const { return static_cast<int>(X.cols()); }
  // Throws DimensionMismatch on any shape violation.
  void validate() const;
};

class WeightW {
 public:
  explicit WeightW(ModalityLayout layout);  // zeros
  WeightW(ModalityLayout layout, Matrix values);

  const ModalityLayout& layout() const { return layout_; }
  const Matrix& values() const { return values_; }
  Matrix& values() { return values_; }

  // Rows of modality `modality` across all c frames, frame-major:
  // (c*q_i) x r.
  Matrix block(int modality) const;
  void set_block(int modality, const Matrix& block);
  double block_norm(int modality) const;

  // Rows of frame `frame` across all modalities: q x r.
  Matrix frame_rows(int frame) const;

 private:
  void check_modality(int modality) const;

  ModalityLayout layout_;
  Matrix values_;
};

class WeightU {
 public:
  explicit WeightU(ModalityLayout layout);  // zeros
  WeightU(ModalityLayout layout, Matrix values);

  const ModalityLayout& layout() const { return layout_; }
  const Matrix& values() const { return values_; }
  Matrix& values() { return values_; }

  // r x r block of frame k, 0 = most recent.
  Matrix block(int frame) const;
  void set_block(int frame, const Matrix& block);
  double block_norm(int frame) const;

 private:
  void check_frame(int frame) const;

  ModalityLayout layout_;
  Matrix values_;
};

}  // namespace offsetnav
