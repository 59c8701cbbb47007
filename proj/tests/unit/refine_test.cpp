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

#include <gtest/gtest.h>

#include "sara/synth.hpp"

namespace sara::refine {
namespace {

ProbMap Filled(float v) { return ProbMap::Validate({2, 2}, std::vector<float>(4, v)); }

TEST(ClassScores, Validation) {
  EXPECT_THROW(ClassScores({1.0}, 0), Error);
  EXPECT_THROW(ClassScores({1.0, 2.0}, 2), Error);
  EXPECT_THROW(ClassScores({1.0, std::nan("")}, 0), Error);
  EXPECT_EQ(ClassScores({0.1, 0.9, 0.3}, 0).argmax(), 1u);
}

TEST(FusionWeight, DefaultIsOneAndNegativeRejected) {
  EXPECT_EQ(kDefaultFusionAlpha, 1.0);
  EXPECT_EQ(FusionWeight().alpha(), 1.0);
  EXPECT_THROW(FusionWeight(-0.5), Error);
  EXPECT_THROW(FusionWeight(std::numeric_limits<double>::infinity()), Error);
}

TEST(FuseScores, WorkedExample) {
  const auto s = FuseScores(ClassScores({0.4, 0.2}, 0), ClassScores({0.8, 0.0}, 0),
                            FusionWeight(1.0));
  EXPECT_NEAR(s.scores()[0], 0.6, 1e-12);
  EXPECT_NEAR(s.scores()[1], 0.1, 1e-12);
}

TEST(FuseScores, AlphaZeroIsIdentityAndEqualInputsAreFixed) {
  synth::Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const auto n = rng.UniformInt(2, 9);
    std::vector<double> b(n), r(n);
    for (auto& v : b) v = rng.Uniform(-20, 20);
    for (auto& v : r) v = rng.Uniform(-20, 20);
    const ClassScores sb(b, 0), sr(r, 0);
    const auto id = FuseScores(sb, sr, FusionWeight(0.0));
    EXPECT_TRUE(std::equal(id.scores().begin(), id.scores().end(), b.begin()));
    EXPECT_EQ(id.argmax(), sb.argmax());
    const auto fixed = FuseScores(sb, sb, FusionWeight(rng.Uniform(0, 100)));
    EXPECT_TRUE(std::equal(fixed.scores().begin(), fixed.scores().end(), b.begin()));
  }
}

TEST(FuseScores, ConvexCombinationBounds) {
  synth::Rng rng(9);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> b(4), r(4);
    for (auto& v : b) v = rng.Uniform(-1e3, 1e3);
    for (auto& v : r) v = rng.Uniform(-1e3, 1e3);
    const double alpha = i % 10 == 0 ? rng.Uniform(0, 1e9) : rng.Uniform(0, 5);
    const auto s = FuseScores(ClassScores(b, 1), ClassScores(r, 1), FusionWeight(alpha));
    for (std::size_t k = 0; k < 4; ++k) {
      ASSERT_GE(s.scores()[k], std::min(b[k], r[k]));
      ASSERT_LE(s.scores()[k], std::max(b[k], r[k]));
    }
  }
}

TEST(FuseScores, LengthMismatch) {
  try {
    FuseScores(ClassScores({1, 2}, 0), ClassScores({1, 2, 3}, 0), FusionWeight());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
  EXPECT_THROW(FuseScores(ClassScores({1, 2}, 0), ClassScores({1, 2}, 1), FusionWeight()),
               Error);
}

TEST(AssignPseudoLabel, Examples) {
  EXPECT_EQ(AssignPseudoLabel(ClassScores({5.0, 0.2, 0.5}, 0)), 2u);
  EXPECT_EQ(AssignPseudoLabel(ClassScores({0.0, 3.0, 1.0}, 0)), 1u);
  EXPECT_EQ(AssignPseudoLabel(ClassScores({9.0, 1.0, 1.0}, 0)), 1u);
  EXPECT_EQ(AssignPseudoLabel(ClassScores({1.0, 1.0, 9.0}, 2)), 0u);
}

TEST(AssignPseudoLabel, NeverBackground) {
  synth::Rng rng(10);
  for (int i = 0; i < 10000; ++i) {
    const auto n = rng.UniformInt(2, 12);
    const auto bg = rng.UniformInt(0, n - 1);
    std::vector<double> s(n);
    // Coarse values force plenty of ties.
    for (auto& v : s) v = std::floor(rng.Uniform(-3, 3));
    if (i % 3 == 0) s[bg] = 1e9;
    const auto label = AssignPseudoLabel(ClassScores(s, bg));
    ASSERT_NE(label, bg);
    ASSERT_LT(label, n);
    for (std::size_t k = 0; k < n; ++k) {
      if (k == bg) continue;
      ASSERT_GE(s[label], s[k]);
      if (s[k] == s[label]) ASSERT_LE(label, k);
    }
  }
}

TEST(MaskStack, SelectsForegroundMaps) {
  const MaskStack stack({Filled(0.1f), Filled(0.2f), Filled(0.3f)}, 0);
  EXPECT_EQ(stack.num_classes(), 4u);
  EXPECT_EQ(SelectClassMask(stack, 1).at(0, 0), 0.1f);
  EXPECT_EQ(SelectClassMask(stack, 3).at(1, 1), 0.3f);
  EXPECT_THROW(SelectClassMask(stack, 0), Error);
  EXPECT_THROW(SelectClassMask(stack, 4), Error);
  const MaskStack mid({Filled(0.1f), Filled(0.2f)}, 1);
  EXPECT_EQ(SelectClassMask(mid, 0).at(0, 0), 0.1f);
  EXPECT_EQ(SelectClassMask(mid, 2).at(0, 0), 0.2f);
  EXPECT_THROW(SelectClassMask(mid, 1), Error);
}

TEST(MaskStack, RejectsMixedShapes) {
  EXPECT_THROW(MaskStack({Filled(0.1f), ProbMap::Validate({1, 4}, {0, 0, 0, 0})}, 0), Error);
  EXPECT_THROW(MaskStack({}, 0), Error);
}

TEST(FuseMaskFeatures, SumIsCommutativeAndZeroIsNeutral) {
  const PooledGrid a({1, 2, 2}, {1, 2, 3, 4});
  const PooledGrid b({1, 2, 2}, {0.5f, -1, 0, 2});
  const PooledGrid zero({1, 2, 2}, {0, 0, 0, 0});
  EXPECT_EQ(FuseMaskFeatures(a, zero), a);
  EXPECT_EQ(FuseMaskFeatures(a, b), FuseMaskFeatures(b, a));
  EXPECT_EQ(FuseMaskFeatures(a, b), PooledGrid({1, 2, 2}, {1.5f, 1, 3, 6}));
  try {
    FuseMaskFeatures(a, PooledGrid({1, 1, 4}, {0, 0, 0, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(Iou, Examples) {
  EXPECT_NEAR(Iou({0, 0, 2, 2}, {1, 0, 3, 2}), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(Iou({0, 0, 2, 2}, {0, 0, 2, 2}), 1.0);
  EXPECT_EQ(Iou({0, 0, 1, 1}, {2, 2, 3, 3}), 0.0);
  EXPECT_EQ(Iou({0, 0, 1, 1}, {1, 0, 2, 1}), 0.0);  // touching
}

TEST(Iou, SymmetricAndBounded) {
  const auto boxes = synth::GenRandomRois(12, {30, 30}, 200);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    EXPECT_EQ(Iou(boxes[i], boxes[i]), 1.0);
    for (std::size_t j = i + 1; j < std::min(boxes.size(), i + 20); ++j) {
      const double v = Iou(boxes[i], boxes[j]);
      EXPECT_EQ(v, Iou(boxes[j], boxes[i]));
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Nms, Examples) {
  const std::vector<RoiBox> one{{0, 0, 1, 1}};
  const std::vector<double> s1{0.3};
  EXPECT_EQ(Nms(one, s1, 0.5), (std::vector<std::size_t>{0}));

  const std::vector<RoiBox> same{{0, 0, 2, 2}, {0, 0, 2, 2}};
  const std::vector<double> s2{0.8, 0.9};
  EXPECT_EQ(Nms(same, s2, kDefaultNmsThreshold), (std::vector<std::size_t>{1}));

  const std::vector<RoiBox> apart{{0, 0, 1, 1}, {5, 5, 6, 6}};
  EXPECT_EQ(Nms(apart, s2, 0.5), (std::vector<std::size_t>{1, 0}));
}

TEST(Nms, ThresholdIsStrict) {
  // IoU exactly 1/3 survives a 1/3 threshold.
  const std::vector<RoiBox> b{{0, 0, 2, 2}, {1, 0, 3, 2}};
  const std::vector<double> s{0.9, 0.8};
  EXPECT_EQ(Nms(b, s, Iou(b[0], b[1])).size(), 2u);
  EXPECT_EQ(Nms(b, s, 0.3).size(), 1u);
}

TEST(Nms, TiesKeepLowestIndexFirst) {
  const std::vector<RoiBox> b{{0, 0, 2, 2}, {0, 0, 2, 2}, {9, 9, 10, 10}};
  const std::vector<double> s{0.5, 0.5, 0.5};
  EXPECT_EQ(Nms(b, s, 0.5), (std::vector<std::size_t>{0, 2}));
}

TEST(Nms, Properties) {
  synth::Rng rng(13);
  const auto boxes = synth::GenRandomRois(14, {40, 40}, 300);
  std::vector<double> scores(boxes.size());
  for (auto& v : scores) v = rng.Uniform();
  EXPECT_EQ(Nms(boxes, scores, 1.0).size(), boxes.size());
  const auto kept = Nms(boxes, scores, 0.5);
  for (std::size_t i = 1; i < kept.size(); ++i) {
    EXPECT_GE(scores[kept[i - 1]], scores[kept[i]]);
  }
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      EXPECT_LE(Iou(boxes[kept[i]], boxes[kept[j]]), 0.5);
    }
  }
}

TEST(Nms, Errors) {
  const std::vector<RoiBox> b{{0, 0, 1, 1}};
  const std::vector<double> s{0.1, 0.2};
  EXPECT_THROW(Nms(b, s, 0.5), Error);
  const std::vector<double> s1{0.1};
  EXPECT_THROW(Nms(b, s1, 1.5), Error);
  EXPECT_THROW(Nms(b, s1, -0.1), Error);
}

}  // namespace
}  // namespace sara::refine
