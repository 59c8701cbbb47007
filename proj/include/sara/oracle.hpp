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

#ifndef SARA_ORACLE_HPP_
#define SARA_ORACLE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sara/tensor.hpp"

// Slow 64-bit reference implementations. Everything here is written
// straight from the defining sums and shares no code with sara::kernels.
namespace sara::oracle {

struct Feature64 {
  Shape3 shape;
  std::vector<double> data;
};

struct Prob64 {
  Shape2 shape;
  std::vector<double> data;
};

struct Pooled64 {
  Shape3 shape;
  std::vector<double> data;
};

Feature64 Widen(const FeatureMap& feature);
Prob64 Widen(const ProbMap& prob);

Pooled64 RoiAlign(const Feature64& feature, const RoiBox& roi,
                  const BinGrid& grid);
Pooled64 SaRoiAlign(const Feature64& feature, const RoiBox& roi,
                    const Prob64& prob, const BinGrid& grid);

/// Optional box constraint for a probed coordinate. When x +- eps would
/// leave [lo, hi], a one-sided difference is used instead.
struct ProbeBounds {
  double lo;
  double hi;
};

using ScalarLoss = std::function<double(std::span<const double>)>;

/// Central difference (L(x + eps e_i) - L(x - eps e_i)) / (2 eps).
/// Throws kInvalidArgument if eps <= 0 or index is out of range.
double FiniteDiffGrad(const ScalarLoss& loss, std::span<const double> input,
                      std::size_t index, double eps,
                      std::optional<ProbeBounds> bounds = std::nullopt);

enum class KernelKind { kRoiAlign, kShapeAware };
enum class GradTarget { kFeature, kProb };

const char* KernelKindName(KernelKind kind);
const char* GradTargetName(GradTarget target);

struct GradCheckInstance {
  FeatureMap feature;
  RoiBox roi;
  std::optional<ProbMap> prob;
  BinGrid grid;
  /// Adjoint seed: one weight per pooled output, L = sum(seed * output).
  std::vector<float> seed;
};

struct GradCheckReport {
  GradTarget target = GradTarget::kFeature;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic_value = 0.0;
  double numeric_value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

/// Seeded instance: 4x8x8 features in [0, 1), a 6x6 prob map (shape-aware
/// only), rows/cols in [1, 4], s in [1, 2], adjoint seed in [-1, 1).
GradCheckInstance RandomGradCheckInstance(std::uint64_t seed, KernelKind kind);

/// Relative error |a - n| / max(1e-6, |a| + |n|).
double RelativeError(double analytic, double numeric);

/// Hook applied to the analytic gradients before comparison. Used for
/// fault-injection tests.
using GradTamper = std::function<void(GradBundle&)>;

/// Compares every analytic gradient coordinate of the chosen target
/// (from sara::kernels backward) against finite differences of the oracle
/// forward. Throws kInvalidArgument for a P target on plain RoIAlign or
/// a missing prob map.
GradCheckReport GradCheck(KernelKind kind, const GradCheckInstance& instance,
                          GradTarget target, double eps, double tolerance,
                          const GradTamper& tamper = {});

}  // namespace sara::oracle

#endif  // SARA_ORACLE_HPP_
