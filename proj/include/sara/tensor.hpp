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

#ifndef SARA_TENSOR_HPP_
#define SARA_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sara {

enum class ErrorCode {
  kOk = 0,
  kInvalidArgument,
  kLengthMismatch,
  kNonFiniteValue,
  kRangeViolation,
  kShapeMismatch,
  kBadMagic,
  kUnsupportedVersion,
  kTruncatedStream,
  kIoError,
  kInfeasibleGeometry,
  kUndefinedSimilarity,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Axis-aligned rectangle in continuous feature-map coordinates.
///
/// x runs along columns, y along rows. Grid cell (row j, col k) is centered
/// at (x = k, y = j), so a map of width W covers x in [-0.5, W - 0.5].
struct RoiBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
};

/// Throws kInvalidArgument unless the box is finite with positive extent.
void ValidateRoi(const RoiBox& roi);

/// H x W bins, each sampled on an s x s regular sub-grid (N = s * s).
struct BinGrid {
  std::uint32_t rows = 7;
  std::uint32_t cols = 7;
  std::uint32_t samples_per_side = 2;

  std::uint32_t samples_per_bin() const {
    return samples_per_side * samples_per_side;
  }
};

void ValidateGrid(const BinGrid& grid);

struct Shape3 {
  std::uint32_t channels = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;

  std::size_t size() const {
    return std::size_t{channels} * height * width;
  }
  friend bool operator==(const Shape3&, const Shape3&) = default;
};

struct Shape2 {
  std::uint32_t height = 0;
  std::uint32_t width = 0;

  std::size_t size() const { return std::size_t{height} * width; }
  friend bool operator==(const Shape2&, const Shape2&) = default;
};

/// Dense channel-first feature map, immutable after validation.
class FeatureMap {
 public:
  FeatureMap() = default;

  /// Errors: kInvalidArgument (zero dim), kLengthMismatch, kNonFiniteValue.
  static FeatureMap Validate(Shape3 shape, std::vector<float> data);

  const Shape3& shape() const { return shape_; }
  std::uint32_t channels() const { return shape_.channels; }
  std::uint32_t height() const { return shape_.height; }
  std::uint32_t width() const { return shape_.width; }
  std::span<const float> data() const { return data_; }
  std::span<const float> plane(std::uint32_t c) const {
    return std::span<const float>(data_).subspan(
        std::size_t{c} * height() * width(), std::size_t{height()} * width());
  }
  float at(std::uint32_t c, std::uint32_t y, std::uint32_t x) const {
    return data_[(std::size_t{c} * height() + y) * width() + x];
  }

 private:
  FeatureMap(Shape3 shape, std::vector<float> data)
      : shape_(shape), data_(std::move(data)) {}

  Shape3 shape_;
  std::vector<float> data_;
};

/// Per-location probability of the instance-of-interest, entries in [0, 1].
class ProbMap {
 public:
  ProbMap() = default;

  /// Errors: kInvalidArgument (zero dim), kLengthMismatch, kRangeViolation.
  /// Negative zero is stored as +0.
  static ProbMap Validate(Shape2 shape, std::vector<float> data);

  const Shape2& shape() const { return shape_; }
  std::uint32_t height() const { return shape_.height; }
  std::uint32_t width() const { return shape_.width; }
  std::span<const float> data() const { return data_; }
  float at(std::uint32_t y, std::uint32_t x) const {
    return data_[std::size_t{y} * width() + x];
  }

 private:
  ProbMap(Shape2 shape, std::vector<float> data)
      : shape_(shape), data_(std::move(data)) {}

  Shape2 shape_;
  std::vector<float> data_;
};

/// C x H x W pooled output. samples_per_side is 0 when the grid that
/// produced it is unknown (e.g. after reading from a file).
class PooledGrid {
 public:
  PooledGrid() = default;
  PooledGrid(Shape3 shape, std::vector<float> data,
             std::uint32_t samples_per_side = 0);

  const Shape3& shape() const { return shape_; }
  std::uint32_t channels() const { return shape_.channels; }
  std::uint32_t rows() const { return shape_.height; }
  std::uint32_t cols() const { return shape_.width; }
  std::uint32_t samples_per_side() const { return samples_per_side_; }
  std::span<const float> data() const { return data_; }
  float at(std::uint32_t c, std::uint32_t h, std::uint32_t w) const {
    return data_[(std::size_t{c} * rows() + h) * cols() + w];
  }

  friend bool operator==(const PooledGrid& a, const PooledGrid& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape3 shape_;
  std::vector<float> data_;
  std::uint32_t samples_per_side_ = 0;
};

/// Gradients of a scalar loss w.r.t. the feature map and, for the
/// shape-aware kernel, the probability map.
struct GradBundle {
  Shape3 feature_shape;
  std::vector<float> grad_feature;
  std::optional<Shape2> prob_shape;
  std::vector<float> grad_prob;
};

/// Untyped tensor as stored in a SARA container.
struct RawTensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  friend bool operator==(const RawTensor&, const RawTensor&) = default;
};

RawTensor ToRaw(const FeatureMap& t);
RawTensor ToRaw(const ProbMap& t);
RawTensor ToRaw(const PooledGrid& t);

FeatureMap FeatureMapFromRaw(RawTensor raw);
ProbMap ProbMapFromRaw(RawTensor raw);
PooledGrid PooledGridFromRaw(RawTensor raw);

}  // namespace sara

#endif  // SARA_TENSOR_HPP_
