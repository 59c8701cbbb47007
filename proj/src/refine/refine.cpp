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

#include "sara/refine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sara::refine {

ClassScores::ClassScores(std::vector<double> scores, std::size_t background_index)
    : scores_(std::move(scores)), background_index_(background_index) {
  if (scores_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least two classes");
  }
  if (background_index_ >= scores_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "background index out of range");
  }
  for (double s : scores_) {
    if (!std::isfinite(s)) {
      throw Error(ErrorCode::kNonFiniteValue, "class score is not finite");
    }
  }
}

std::size_t ClassScores::argmax() const {
  return static_cast<std::size_t>(
      std::max_element(scores_.begin(), scores_.end()) - scores_.begin());
}

FusionWeight::FusionWeight(double alpha) : alpha_(alpha) {
  if (!std::isfinite(alpha) || alpha < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "fusion weight must be finite and >= 0");
  }
}

MaskStack::MaskStack(std::vector<ProbMap> maps, std::size_t background_index)
    : maps_(std::move(maps)), background_index_(background_index) {
  if (maps_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "mask stack is empty");
  }
  if (background_index_ > maps_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "background index out of range");
  }
  for (const auto& m : maps_) {
    if (!(m.shape() == maps_.front().shape())) {
      throw Error(ErrorCode::kShapeMismatch, "mask stack maps differ in shape");
    }
  }
}

PooledGrid FuseMaskFeatures(const PooledGrid& pooled, const PooledGrid& f_minus) {
  if (!(pooled.shape() == f_minus.shape())) {
    throw Error(ErrorCode::kShapeMismatch, "cannot fuse grids of different shape");
  }
  std::vector<float> out(pooled.data().size());
  std::transform(pooled.data().begin(), pooled.data().end(),
                 f_minus.data().begin(), out.begin(), std::plus<>());
  return PooledGrid(pooled.shape(), std::move(out), pooled.samples_per_side());
}

ClassScores FuseScores(const ClassScores& sb, const ClassScores& sr,
                       FusionWeight weight) {
  if (sb.size() != sr.size()) {
    throw Error(ErrorCode::kLengthMismatch, "score vectors differ in length");
  }
  if (sb.background_index() != sr.background_index()) {
    throw Error(ErrorCode::kInvalidArgument, "background indices differ");
  }
  const double alpha = weight.alpha();
  std::vector<double> fused(sb.size());
  for (std::size_t i = 0; i < fused.size(); ++i) {
    const double b = sb.scores()[i];
    const double r = sr.scores()[i];
    // Equal inputs are a fixed point; rounding must not break that.
    fused[i] = b == r ? b : (b + alpha * r) / (1.0 + alpha);
    // Keep the result inside [min, max] despite rounding.
    fused[i] = std::clamp(fused[i], std::min(b, r), std::max(b, r));
  }
  return ClassScores(std::move(fused), sb.background_index());
}

std::size_t AssignPseudoLabel(const ClassScores& scores) {
  const auto s = scores.scores();
  const std::size_t bg = scores.background_index();
  std::size_t best = bg == 0 ? 1 : 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i != bg && s[i] > s[best]) best = i;
  }
  return best;
}

const ProbMap& SelectClassMask(const MaskStack& stack, std::size_t label) {
  if (label >= stack.num_classes()) {
    throw Error(ErrorCode::kInvalidArgument,
                "class " + std::to_string(label) + " out of range");
  }
  if (label == stack.background_index()) {
    throw Error(ErrorCode::kInvalidArgument, "background has no mask");
  }
  const std::size_t slot = label > stack.background_index() ? label - 1 : label;
  return stack.maps()[slot];
}

double Iou(const RoiBox& a, const RoiBox& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<std::size_t> Nms(std::span<const RoiBox> boxes,
                             std::span<const double> scores, double threshold) {
  if (boxes.size() != scores.size()) {
    throw Error(ErrorCode::kLengthMismatch, "boxes and scores differ in length");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "NMS threshold outside [0, 1]");
  }
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return scores[i] > scores[j];
  });
  std::vector<bool> suppressed(boxes.size(), false);
  std::vector<std::size_t> kept;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t i = order[oi];
    if (suppressed[i]) continue;
    kept.push_back(i);
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const std::size_t j = order[oj];
      if (!suppressed[j] && Iou(boxes[i], boxes[j]) > threshold) suppressed[j] = true;
    }
  }
  return kept;
}

}  // namespace sara::refine
