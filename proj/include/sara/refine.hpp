// Copyright 2026 The SARA Authors. All Rights Reserved.
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

#ifndef SARA_REFINE_HPP_
#define SARA_REFINE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sara/tensor.hpp"

namespace sara::refine {

inline constexpr double kDefaultFusionAlpha = 1.0;
inline constexpr double kDefaultNmsThreshold = 0.5;

/// Pre-softmax class activations with a designated background class.
class ClassScores {
 public:
  /// Errors: kInvalidArgument (fewer than two classes, background index out
  /// of range), kNonFiniteValue.
  ClassScores(std::vector<double> scores, std::size_t background_index);

  std::span<const double> scores() const { return scores_; }
  std::size_t size() const { return scores_.size(); }
  std::size_t background_index() const { return background_index_; }
  std::size_t argmax() const;

 private:
  std::vector<double> scores_;
  std::size_t background_index_;
};

/// Relative weight of the refining head's scores.
class FusionWeight {
 public:
  explicit FusionWeight(double alpha = kDefaultFusionAlpha);
  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

/// Per-foreground-class probability maps of identical shape. Foreground
/// classes are the class indices other than the background index, in
/// increasing order; maps()[i] belongs to the i-th of them.
class MaskStack {
 public:
  MaskStack(std::vector<ProbMap> maps, std::size_t background_index);

  std::span<const ProbMap> maps() const { return maps_; }
  std::size_t background_index() const { return background_index_; }
  std::size_t num_classes() const { return maps_.size() + 1; }

 private:
  std::vector<ProbMap> maps_;
  std::size_t background_index_;
};

/// Element-wise sum of two pooled grids of identical shape.
PooledGrid FuseMaskFeatures(const PooledGrid& pooled,
                            const PooledGrid& f_minus);

/// (sb + alpha * sr) / (1 + alpha), element-wise.
ClassScores FuseScores(const ClassScores& sb, const ClassScores& sr,
                       FusionWeight weight = FusionWeight());

/// The argmax class if it is foreground, else the highest-scoring
/// foreground class. Ties go to the lowest index.
std::size_t AssignPseudoLabel(const ClassScores& scores);

const ProbMap& SelectClassMask(const MaskStack& stack, std::size_t label);

double Iou(const RoiBox& a, const RoiBox& b);

/// Greedy NMS. Suppresses boxes whose IoU with a kept box is strictly
/// greater than the threshold. Returns kept indices in keep order.
std::vector<std::size_t> Nms(std::span<const RoiBox> boxes,
                             std::span<const double> scores,
                             double threshold = kDefaultNmsThreshold);

}  // namespace sara::refine

#endif  // SARA_REFINE_HPP_
