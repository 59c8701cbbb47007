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

#ifndef SARA_SYNTH_HPP_
#define SARA_SYNTH_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sara/tensor.hpp"

namespace sara::synth {

/// Portable seeded generator: std::mt19937_64 with explicit conversions
/// (53-bit mantissa uniforms, Box-Muller normals), so sequences do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  /// Uniform in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  /// Uniform integer in [lo, hi].
  std::uint32_t UniformInt(std::uint32_t lo, std::uint32_t hi);
  double Normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

struct RandomCaseSpec {
  Shape3 feature_shape{4, 16, 16};
  Shape2 prob_shape{14, 14};
  BinGrid grid;
  bool with_prob = true;
  float feature_lo = 0.0f;
  float feature_hi = 1.0f;
};

struct RandomCase {
  std::uint64_t seed = 0;
  FeatureMap feature;
  RoiBox roi;
  std::optional<ProbMap> prob;
  BinGrid grid;
};

/// Deterministic per (seed, spec). The RoI has positive extent and at
/// least half of its area inside the map extent [-0.5, dim - 0.5].
/// Throws kInvalidArgument for zero dims.
RandomCase GenRandomCase(std::uint64_t seed, const RandomCaseSpec& spec);

/// `count` RoIs drawn with the same rule as GenRandomCase.
std::vector<RoiBox> GenRandomRois(std::uint64_t seed, Shape2 map_shape,
                                  std::size_t count);

struct HuddleParams {
  std::uint32_t map_height = 32;
  std::uint32_t map_width = 48;
  std::uint32_t instance_width = 12;
  std::uint32_t instance_height = 14;
  std::uint32_t gap = 1;
  std::uint32_t signature_dim = 8;
  double roi_scale = 1.95;  // RoI width / instance width
  double sigma = 0.0;
  std::uint64_t seed = 0;
  Shape2 mask_crop{28, 28};
};

struct HuddleScenario {
  HuddleParams params;
  FeatureMap feature;
  ProbMap mask_a;  // global, map-sized
  ProbMap mask_b;
  RoiBox gt_a;
  RoiBox gt_b;
  RoiBox roi_1;  // assigned to instance A
  RoiBox roi_2;  // assigned to instance B
  std::vector<double> signature_a;
  std::vector<double> signature_b;
};

/// Two side-by-side rectangular instances with orthonormal channel
/// signatures, and two heavily overlapping RoIs straddling both.
/// Throws kInfeasibleGeometry when the layout does not fit or any
/// scenario invariant fails.
HuddleScenario GenHuddle(const HuddleParams& params);

/// Throws kInfeasibleGeometry naming the first violated invariant.
void CheckHuddleInvariants(const HuddleScenario& scenario);

/// Resamples a map-sized mask into the frame of `roi` (cell centers of the
/// crop mapped back through the RoI) by zero-padded bilinear sampling.
ProbMap CropMaskToRoi(const ProbMap& global_mask, const RoiBox& roi,
                      Shape2 crop_shape);

struct Separability {
  double cos_plain = 0.0;
  double cos_shaped = 0.0;
};

/// Cosine similarities of flattened pooled grids of roi_1 vs roi_2, plain
/// and shape-aware (each with its own instance's mask). Throws
/// kUndefinedSimilarity if any pooled grid is the zero vector.
Separability FeatureSeparability(const HuddleScenario& scenario,
                                 const BinGrid& grid);

double CosineSimilarity(std::span<const float> a, std::span<const float> b);

/// Writes feature.sara, mask_a.sara, mask_b.sara and scenario.json into
/// `directory` (which must exist).
void ExportHuddle(const HuddleScenario& scenario, const std::string& directory);

}  // namespace sara::synth

#endif  // SARA_SYNTH_HPP_
