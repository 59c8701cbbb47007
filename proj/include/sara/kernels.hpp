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

#ifndef SARA_KERNELS_HPP_
#define SARA_KERNELS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sara/tensor.hpp"

namespace sara::kernels {

/// A continuous sampling location inside bin (bin_row, bin_col).
struct SamplePoint {
  double a = 0.0;  // x / column
  double b = 0.0;  // y / row
  std::uint32_t bin_row = 0;
  std::uint32_t bin_col = 0;
  std::uint32_t index = 0;  // u * s + v within the bin
};

/// Four grid neighbours and their bilinear weights. Out-of-range neighbours
/// carry weight 0 and index 0.
struct BilinearStencil {
  std::array<std::size_t, 4> index{};
  std::array<double, 4> weight{};
};

/// Zero-padded stencil for feature sampling on an H x W grid.
BilinearStencil FeatureStencil(double a, double b, std::uint32_t height,
                               std::uint32_t width);

/// Edge-clamped stencil for probability sampling: coordinates are clamped
/// into [0, dim - 1] first, so the weights always sum to one.
BilinearStencil ProbStencil(double c, double d, std::uint32_t height,
                            std::uint32_t width);

/// f(a, b) on channel c, zero outside the map.
double BilinearSample(const FeatureMap& feature, double a, double b,
                      std::uint32_t channel);

/// Sub-cell centers of an s x s grid in every bin, ordered (h, w, u, v).
std::vector<SamplePoint> MakeSamplePoints(const RoiBox& roi,
                                          const BinGrid& grid);

struct ProbCoord {
  double c = 0.0;  // horizontal, P column units
  double d = 0.0;  // vertical, P row units
};

/// Maps a feature-map location into the cell-center frame of a probability
/// map that spans the RoI exactly.
ProbCoord RoiToProbCoords(double a, double b, const RoiBox& roi,
                          Shape2 prob_shape);

double ProbSample(const ProbMap& prob, double c, double d);

PooledGrid RoiAlignForward(const FeatureMap& feature, const RoiBox& roi,
                           const BinGrid& grid);

GradBundle RoiAlignBackward(const PooledGrid& grad_out, const RoiBox& roi,
                            const BinGrid& grid, Shape3 feature_shape);

PooledGrid SaRoiAlignForward(const FeatureMap& feature, const RoiBox& roi,
                             const ProbMap& prob, const BinGrid& grid);

GradBundle SaRoiAlignBackward(const PooledGrid& grad_out,
                              const FeatureMap& feature, const RoiBox& roi,
                              const ProbMap& prob, const BinGrid& grid);

// ---------------------------------------------------------------------------
// Batch driver

enum class BatchMode { kForward, kForwardBackward };

struct BatchJob {
  const FeatureMap* feature = nullptr;
  RoiBox roi;
  const ProbMap* prob = nullptr;  // null selects plain RoIAlign
  BinGrid grid;
  const PooledGrid* grad_out = nullptr;  // null means all ones
};

struct BatchResult {
  ErrorCode status = ErrorCode::kOk;
  std::string message;
  PooledGrid output;
  std::optional<GradBundle> grads;

  bool ok() const { return status == ErrorCode::kOk; }
};

/// Runs every job and returns results in job order. A failing job only
/// marks its own slot. Output is bit-identical for any worker count.
std::vector<BatchResult> BatchRun(const std::vector<BatchJob>& jobs,
                                  BatchMode mode, unsigned workers);

}  // namespace sara::kernels

#endif  // SARA_KERNELS_HPP_
