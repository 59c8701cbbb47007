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

#include "sara/oracle.hpp"

#include <cmath>

#include <gtest/gtest.h>

namespace sara::oracle {
namespace {

Feature64 Ramp(Shape3 s) {
  Feature64 f{s, std::vector<double>(s.size())};
  for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] = 0.01 * static_cast<double>(i % 37);
  return f;
}

TEST(OracleRoiAlign, ConstantFeatureGivesConstantOutput) {
  const Feature64 f{{2, 9, 9}, std::vector<double>(162, 1.25)};
  const auto out = RoiAlign(f, {1.5, 0.5, 7.25, 6.0}, {7, 7, 2});
  for (double v : out.data) EXPECT_NEAR(v, 1.25, 1e-14);
}

TEST(OracleRoiAlign, SingleSampleIsBilinearAtCenter) {
  const Feature64 f{{1, 2, 2}, {1, 2, 3, 4}};
  const auto out = RoiAlign(f, {0, 0, 1, 1}, {1, 1, 1});
  EXPECT_DOUBLE_EQ(out.data[0], 2.5);
}

TEST(OracleSaRoiAlign, OnesAndZeros) {
  const auto f = Ramp({3, 8, 8});
  const RoiBox roi{-1.5, 0.25, 6.5, 9.0};
  const Prob64 ones{{5, 4}, std::vector<double>(20, 1.0)};
  const Prob64 zeros{{5, 4}, std::vector<double>(20, 0.0)};
  const BinGrid g{3, 4, 2};
  EXPECT_EQ(SaRoiAlign(f, roi, ones, g).data, RoiAlign(f, roi, g).data);
  for (double v : SaRoiAlign(f, roi, zeros, g).data) EXPECT_EQ(v, 0.0);
}

TEST(FiniteDiffGrad, LinearIsExact) {
  const ScalarLoss loss = [](std::span<const double> x) { return 3.0 * x[0]; };
  const std::vector<double> x{0.7};
  for (double eps : {1e-1, 1e-3, 0.5}) {
    EXPECT_NEAR(FiniteDiffGrad(loss, x, 0, eps), 3.0, 1e-12);
  }
  // With a power-of-two step and point the arithmetic is exact.
  const std::vector<double> zero{0.0};
  EXPECT_EQ(FiniteDiffGrad(loss, zero, 0, 0x1p-10), 3.0);
}

TEST(FiniteDiffGrad, QuadraticCentralDifferenceCancels) {
  const ScalarLoss loss = [](std::span<const double> x) { return x[0] * x[0]; };
  const std::vector<double> x{1.0};
  EXPECT_NEAR(FiniteDiffGrad(loss, x, 0, 1e-3), 2.0, 1e-6);
}

TEST(FiniteDiffGrad, OneSidedAtBounds) {
  const ScalarLoss loss = [](std::span<const double> x) {
    if (x[0] < 0.0 || x[0] > 1.0) throw std::logic_error("probe left the box");
    return 2.0 * x[0];
  };
  const ProbeBounds unit{0.0, 1.0};
  for (double v : {0.0, 0.0004, 0.5, 0.9996, 1.0}) {
    const std::vector<double> x{v};
    EXPECT_NEAR(FiniteDiffGrad(loss, x, 0, 1e-3, unit), 2.0, 1e-9) << v;
  }
}

TEST(FiniteDiffGrad, RejectsBadArguments) {
  const ScalarLoss loss = [](std::span<const double> x) { return x[0]; };
  const std::vector<double> x{1.0};
  for (double eps : {0.0, -1e-3}) {
    try {
      FiniteDiffGrad(loss, x, 0, eps);
      FAIL() << eps;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    }
  }
  EXPECT_THROW(FiniteDiffGrad(loss, x, 1, 1e-3), Error);
}

TEST(RelativeError, FloorsTheDenominator) {
  EXPECT_EQ(RelativeError(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(RelativeError(1e-9, 0.0), 1e-3);
  EXPECT_DOUBLE_EQ(RelativeError(1.0, 3.0), 0.5);
}

TEST(GradCheck, RandomInstancesPass) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto plain = RandomGradCheckInstance(seed, KernelKind::kRoiAlign);
    EXPECT_FALSE(plain.prob.has_value());
    EXPECT_TRUE(GradCheck(KernelKind::kRoiAlign, plain, GradTarget::kFeature, 1e-3, 1e-3).pass);
    const auto sa = RandomGradCheckInstance(seed, KernelKind::kShapeAware);
    for (auto t : {GradTarget::kFeature, GradTarget::kProb}) {
      const auto rep = GradCheck(KernelKind::kShapeAware, sa, t, 1e-3, 1e-3);
      EXPECT_TRUE(rep.pass) << seed << " " << GradTargetName(t) << " " << rep.max_rel_error;
      EXPECT_GE(rep.max_rel_error, 0.0);
      EXPECT_EQ(rep.tolerance, 1e-3);
    }
  }
}

TEST(GradCheck, ZeroFeatureProbGradientIsZero) {
  auto inst = RandomGradCheckInstance(4, KernelKind::kShapeAware);
  inst.feature = FeatureMap::Validate(inst.feature.shape(),
                                      std::vector<float>(inst.feature.shape().size(), 0.0f));
  const auto rep = GradCheck(KernelKind::kShapeAware, inst, GradTarget::kProb, 1e-3, 1e-3);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.max_rel_error, 0.0);
  EXPECT_EQ(rep.analytic_value, 0.0);
  EXPECT_EQ(rep.numeric_value, 0.0);
}

TEST(GradCheck, FaultInjectionIsCaughtAtThatCoordinate) {
  const auto inst = RandomGradCheckInstance(2, KernelKind::kShapeAware);
  for (auto target : {GradTarget::kFeature, GradTarget::kProb}) {
    // Corrupt the coordinate with the largest gradient so the fault is visible.
    const auto clean = GradCheck(KernelKind::kShapeAware, inst, target, 1e-3, 1e-3);
    std::size_t victim = 0;
    auto tamper_probe = [&](GradBundle& g) {
      auto& v = target == GradTarget::kFeature ? g.grad_feature : g.grad_prob;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[victim])) victim = i;
      }
    };
    GradCheck(KernelKind::kShapeAware, inst, target, 1e-3, 1e-3, tamper_probe);
    const auto rep = GradCheck(KernelKind::kShapeAware, inst, target, 1e-3, 1e-3,
                               [&](GradBundle& g) {
                                 auto& v = target == GradTarget::kFeature ? g.grad_feature
                                                                          : g.grad_prob;
                                 v[victim] *= 2.0f;
                               });
    EXPECT_TRUE(clean.pass);
    EXPECT_FALSE(rep.pass) << GradTargetName(target);
    EXPECT_EQ(rep.worst_index, victim) << GradTargetName(target);
    EXPECT_NEAR(rep.analytic_value, 2.0 * rep.numeric_value, 1e-3 * std::abs(rep.numeric_value));
  }
}

TEST(GradCheck, RejectsProbTargetOnPlainKernel) {
  const auto inst = RandomGradCheckInstance(0, KernelKind::kRoiAlign);
  EXPECT_THROW(GradCheck(KernelKind::kRoiAlign, inst, GradTarget::kProb, 1e-3, 1e-3), Error);
}

TEST(GradCheck, ZeroToleranceFails) {
  const auto inst = RandomGradCheckInstance(1, KernelKind::kRoiAlign);
  EXPECT_FALSE(GradCheck(KernelKind::kRoiAlign, inst, GradTarget::kFeature, 1e-3, 0.0).pass);
}

TEST(RandomGradCheckInstance, DeterministicPerSeed) {
  const auto a = RandomGradCheckInstance(17, KernelKind::kShapeAware);
  const auto b = RandomGradCheckInstance(17, KernelKind::kShapeAware);
  EXPECT_EQ(std::vector<float>(a.feature.data().begin(), a.feature.data().end()),
            std::vector<float>(b.feature.data().begin(), b.feature.data().end()));
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.roi.x1, b.roi.x1);
  EXPECT_EQ(a.feature.shape(), (Shape3{4, 8, 8}));
  EXPECT_EQ(a.prob->shape(), (Shape2{6, 6}));
}

}  // namespace
}  // namespace sara::oracle
