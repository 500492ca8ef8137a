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

#include "offsetnav/model.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "offsetnav/errors.hpp"

namespace offsetnav {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

ModalityLayout::ModalityLayout(std::vector<int> widths, int history,
                               int behavior_dim)
    : widths_(std::move(widths)),
      history_(history),
      behavior_dim_(behavior_dim) {
  if (widths_.empty()) throw DimensionMismatch("layout needs at least one modality");
  if (history_ < 1) throw DimensionMismatch("history length c must be >= 1");
  if (behavior_dim_ < 1) throw DimensionMismatch("behavior dimension r must be >= 1");
  offsets_.reserve(widths_.size());
  for (int w : widths_) {
    if (w < 1) throw DimensionMismatch("modality width must be >= 1");
    offsets_.push_back(frame_dim_);
    frame_dim_ += w;
  }
}

int ModalityLayout::width(int modality) const {
  if (modality < 0 || modality >= modalities())
    throw IndexOutOfRange("modality " + std::to_string(modality) +
                          " out of range [0, " + std::to_string(modalities()) + ")");
  return widths_[modality];
}

int ModalityLayout::modality_offset(int modality) const {
  width(modality);
  return offsets_[modality];
}

int ModalityLayout::row(int frame, int modality, int f) const {
  return frame * frame_dim_ + modality_offset(modality) + f;
}

std::vector<Vector> FeatureInstance::frames(const ModalityLayout& layout) const {
  if (values.size() != layout.feature_dim())
    throw DimensionMismatch("instance length " + std::to_string(values.size()) +
                            " != d = " + std::to_string(layout.feature_dim()));
  std::vector<Vector> out;
  const int q = layout.frame_dim();
  for (int k = 0; k < layout.history(); ++k) out.emplace_back(values.segment(k * q, q));
  return out;
}

FeatureInstance build_instance(std::span<const Vector> frames,
                               const ModalityLayout& layout) {
  const int c = layout.history();
  const int q = layout.frame_dim();
  if (static_cast<int>(frames.size()) != c)
    throw DimensionMismatch("expected " + std::to_string(c) + " frames, got " +
                            std::to_string(frames.size()));
  FeatureInstance inst{Vector(layout.feature_dim())};
  for (int k = 0; k < c; ++k) {
    if (frames[k].size() != q)
      throw DimensionMismatch("frame " + std::to_string(k) + " has length " +
                              std::to_string(frames[k].size()) + ", expected " +
                              std::to_string(q));
    inst.values.segment(k * q, q) = frames[k];
  }
  return inst;
}

Vector build_differences(std::span<const Vector> expected,
                         std::span<const Vector> actual,
                         const ModalityLayout& layout) {
  const int c = layout.history();
  const int r = layout.behavior_dim();
  if (static_cast<int>(expected.size()) != c || static_cast<int>(actual.size()) != c)
    throw DimensionMismatch("difference window needs exactly " + std::to_string(c) +
                            " expected and actual behaviors");
  Vector e(layout.difference_dim());
  for (int k = 0; k < c; ++k) {
    if (expected[k].size() != r || actual[k].size() != r)
      throw DimensionMismatch("behavior vector length must be r = " + std::to_string(r));
    e.segment(k * r, r) = actual[k] - expected[k];
  }
  return e;
}

void TrainingSet::validate() const {
  const int n = static_cast<int>(X.cols());
  if (n < 1) throw DimensionMismatch("training set has no samples");
  if (X.rows() != layout.feature_dim())
    throw DimensionMismatch("X is " + shape(X) + ", expected d = " +
                            std::to_string(layout.feature_dim()) + " rows");
  if (Y.rows() != layout.behavior_dim() || Y.cols() != n)
    throw DimensionMismatch("Y is " + shape(Y) + ", expected " +
                            std::to_string(layout.behavior_dim()) + "x" + std::to_string(n));
  if (Yhat.rows() != layout.behavior_dim() || Yhat.cols() != n)
    throw DimensionMismatch("Yhat is " + shape(Yhat) + ", expected " +
                            std::to_string(layout.behavior_dim()) + "x" + std::to_string(n));
  if (E.rows() != layout.difference_dim() || E.cols() != n)
    throw DimensionMismatch("E is " + shape(E) + ", expected " +
                            std::to_string(layout.difference_dim()) + "x" + std::to_string(n));
}

// ---------------------------------------------------------------------------

WeightW::WeightW(ModalityLayout layout)
    : layout_(std::move(layout)),
      values_(Matrix::Zero(layout_.feature_dim(), layout_.behavior_dim())) {}

WeightW::WeightW(ModalityLayout layout, Matrix values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (values_.rows() != layout_.feature_dim() || values_.cols() != layout_.behavior_dim())
    throw DimensionMismatch("W is " + shape(values_) + ", expected " +
                            std::to_string(layout_.feature_dim()) + "x" +
                            std::to_string(layout_.behavior_dim()));
}

void WeightW::check_modality(int modality) const {
  if (modality < 0 || modality >= layout_.modalities())
    throw IndexOutOfRange("modality block " + std::to_string(modality) +
                          " out of range [0, " + std::to_string(layout_.modalities()) + ")");
}

Matrix WeightW::block(int modality) const {
  check_modality(modality);
  const int w = layout_.width(modality);
  Matrix out(layout_.history() * w, layout_.behavior_dim());
  for (int k = 0; k < layout_.history(); ++k)
    out.middleRows(k * w, w) = values_.middleRows(layout_.row(k, modality, 0), w);
  return out;
}

void WeightW::set_block(int modality, const Matrix& block) {
  check_modality(modality);
  const int w = layout_.width(modality);
  if (block.rows() != layout_.history() * w || block.cols() != layout_.behavior_dim())
    throw DimensionMismatch("modality block is " + shape(block));
  for (int k = 0; k < layout_.history(); ++k)
    values_.middleRows(layout_.row(k, modality, 0), w) = block.middleRows(k * w, w);
}

double WeightW::block_norm(int modality) const {
  check_modality(modality);
  const int w = layout_.width(modality);
  double sq = 0.0;
  for (int k = 0; k < layout_.history(); ++k)
    sq += values_.middleRows(layout_.row(k, modality, 0), w).squaredNorm();
  return std::sqrt(sq);
}

Matrix WeightW::frame_rows(int frame) const {
  if (frame < 0 || frame >= layout_.history())
    throw IndexOutOfRange("frame " + std::to_string(frame) + " out of range [0, " +
                          std::to_string(layout_.history()) + ")");
  return values_.middleRows(frame * layout_.frame_dim(), layout_.frame_dim());
}

WeightU::WeightU(ModalityLayout layout)
    : layout_(std::move(layout)),
      values_(Matrix::Zero(layout_.difference_dim(), layout_.behavior_dim())) {}

WeightU::WeightU(ModalityLayout layout, Matrix values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (values_.rows() != layout_.difference_dim() || values_.cols() != layout_.behavior_dim())
    throw DimensionMismatch("U is " + shape(values_) + ", expected " +
                            std::to_string(layout_.difference_dim()) + "x" +
                            std::to_string(layout_.behavior_dim()));
}

void WeightU::check_frame(int frame) const {
  if (frame < 0 || frame >= layout_.history())
    throw IndexOutOfRange("temporal block " + std::to_string(frame) + " out of range [0, " +
                          std::to_string(layout_.history()) + ")");
}

Matrix WeightU::block(int frame) const {
  check_frame(frame);
  const int r = layout_.behavior_dim();
  return values_.middleRows(frame * r, r);
}

void WeightU::set_block(int frame, const Matrix& block) {
  check_frame(frame);
  const int r = layout_.behavior_dim();
  if (block.rows() != r || block.cols() != r)
    throw DimensionMismatch("temporal block is " + shape(block));
  values_.middleRows(frame * r, r) = block;
}

double WeightU::block_norm(int frame) const {
  check_frame(frame);
  const int r = layout_.behavior_dim();
  return values_.middleRows(frame * r, r).norm();
}

}  // namespace offsetnav
