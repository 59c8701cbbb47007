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

#include <gtest/gtest.h>

#include "sara/kernels.hpp"
#include "sara/synth.hpp"

namespace sara::kernels {
namespace {

struct Workload {
  FeatureMap feature;
  ProbMap prob;
  std::vector<BatchJob> jobs;
};

Workload MakeWorkload(std::size_t n) {
  Workload w;
  synth::RandomCaseSpec spec;
  spec.feature_shape = {6, 20, 20};
  spec.prob_shape = {9, 9};
  const auto rc = synth::GenRandomCase(42, spec);
  w.feature = rc.feature;
  w.prob = *rc.prob;
  const auto rois = synth::GenRandomRois(43, {20, 20}, n);
  for (std::size_t i = 0; i < n; ++i) {
    const BinGrid g{1 + static_cast<std::uint32_t>(i % 7), 1 + static_cast<std::uint32_t>(i % 5), 1 + static_cast<std::uint32_t>(i % 3)};
    w.jobs.push_back({nullptr, rois[i], nullptr, g, nullptr});
  }
  for (std::size_t i = 0; i < n; ++i) {
    w.jobs[i].feature = &w.feature;
    if (i % 2) w.jobs[i].prob = &w.prob;
  }
  return w;
}

void ExpectIdentical(const std::vector<BatchResult>& a, const std::vector<BatchResult>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].status, b[i].status) << i;
    ASSERT_EQ(a[i].output, b[i].output) << i;
    ASSERT_EQ(a[i].grads.has_value(), b[i].grads.has_value()) << i;
    if (a[i].grads) {
      ASSERT_EQ(a[i].grads->grad_feature, b[i].grads->grad_feature) << i;
      ASSERT_EQ(a[i].grads->grad_prob, b[i].grads->grad_prob) << i;
    }
  }
}

TEST(BatchRun, SingleJobMatchesDirectCall) {
  auto w = MakeWorkload(2);
  const auto r = BatchRun({w.jobs[1]}, BatchMode::kForward, 4);
  ASSERT_EQ(r.size(), 1u);
  ASSERT_TRUE(r[0].ok());
  EXPECT_EQ(r[0].output, SaRoiAlignForward(w.feature, w.jobs[1].roi, w.prob, w.jobs[1].grid));
}

TEST(BatchRun, ThousandJobsIdenticalAcrossWorkerCounts) {
  const auto w = MakeWorkload(1000);
  const auto one = BatchRun(w.jobs, BatchMode::kForward, 1);
  ExpectIdentical(one, BatchRun(w.jobs, BatchMode::kForward, 8));
  ExpectIdentical(one, BatchRun(w.jobs, BatchMode::kForward, 3));
}

TEST(BatchRun, BackwardIdenticalAcrossWorkerCounts) {
  const auto w = MakeWorkload(200);
  const auto one = BatchRun(w.jobs, BatchMode::kForwardBackward, 1);
  for (const auto& r : one) {
    ASSERT_TRUE(r.ok());
    ASSERT_TRUE(r.grads.has_value());
  }
  ExpectIdentical(one, BatchRun(w.jobs, BatchMode::kForwardBackward, 8));
}

TEST(BatchRun, BackwardDefaultsToAllOnesGradient) {
  auto w = MakeWorkload(1);
  const auto r = BatchRun(w.jobs, BatchMode::kForwardBackward, 1);
  ASSERT_TRUE(r[0].ok());
  const auto& out = r[0].output;
  const PooledGrid ones(out.shape(), std::vector<float>(out.data().size(), 1.0f));
  EXPECT_EQ(r[0].grads->grad_feature,
            RoiAlignBackward(ones, w.jobs[0].roi, w.jobs[0].grid, w.feature.shape()).grad_feature);
}

TEST(BatchRun, InvalidJobOnlyMarksItsSlot) {
  auto w = MakeWorkload(10);
  w.jobs[3].roi = {5, 5, 5, 9};        // zero width
  w.jobs[6].grid.samples_per_side = 0;
  w.jobs[8].feature = nullptr;
  const auto r = BatchRun(w.jobs, BatchMode::kForward, 4);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i == 3 || i == 6 || i == 8) {
      EXPECT_FALSE(r[i].ok()) << i;
      EXPECT_FALSE(r[i].message.empty()) << i;
    } else {
      EXPECT_TRUE(r[i].ok()) << i << ": " << r[i].message;
    }
  }
  EXPECT_EQ(r[3].status, ErrorCode::kInvalidArgument);
}

TEST(BatchRun, GradOutShapeMismatchIsPerJob) {
  auto w = MakeWorkload(3);
  const PooledGrid wrong({1, 1, 1}, {1.0f});
  w.jobs[1].grad_out = &wrong;
  const auto r = BatchRun(w.jobs, BatchMode::kForwardBackward, 2);
  EXPECT_TRUE(r[0].ok());
  EXPECT_EQ(r[1].status, ErrorCode::kShapeMismatch);
  EXPECT_TRUE(r[2].ok());
}

TEST(BatchRun, EmptyBatchAndZeroWorkers) {
  EXPECT_TRUE(BatchRun({}, BatchMode::kForward, 8).empty());
  const auto w = MakeWorkload(4);
  EXPECT_EQ(BatchRun(w.jobs, BatchMode::kForward, 0).size(), 4u);
}

}  // namespace
}  // namespace sara::kernels
