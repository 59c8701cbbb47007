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

#include "sara/tensor.hpp"

#include <cmath>
#include <sstream>

namespace sara {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kRangeViolation: return "RangeViolation";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kTruncatedStream: return "TruncatedStream";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInfeasibleGeometry: return "InfeasibleGeometry";
    case ErrorCode::kUndefinedSimilarity: return "UndefinedSimilarity";
  }
  return "Unknown";
}

void ValidateRoi(const RoiBox& roi) {
  if (!std::isfinite(roi.x1) || !std::isfinite(roi.y1) ||
      !std::isfinite(roi.x2) || !std::isfinite(roi.y2)) {
    throw Error(ErrorCode::kNonFiniteValue, "RoI coordinates must be finite");
  }
  if (!(roi.x2 > roi.x1) || !(roi.y2 > roi.y1)) {
    std::ostringstream os;
    os << "RoI must have positive extent, got (" << roi.x1 << ", " << roi.y1
       << ", " << roi.x2 << ", " << roi.y2 << ")";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
}

void ValidateGrid(const BinGrid& grid) {
  if (grid.rows == 0 || grid.cols == 0 || grid.samples_per_side == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "bin grid needs rows, cols and samples >= 1");
  }
}

namespace {

void CheckLength(std::size_t expected, std::size_t got) {
  if (expected != got) {
    std::ostringstream os;
    os << "data length " << got << " does not match dims (expected "
       << expected << ")";
    throw Error(ErrorCode::kLengthMismatch, os.str());
  }
}

}  // namespace

FeatureMap FeatureMap::Validate(Shape3 shape, std::vector<float> data) {
  if (shape.channels == 0 || shape.height == 0 || shape.width == 0) {
    throw Error(ErrorCode::kInvalidArgument, "feature map dims must be positive");
  }
  CheckLength(shape.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw Error(ErrorCode::kNonFiniteValue,
                  "feature map entry " + std::to_string(i) + " is not finite");
    }
  }
  return FeatureMap(shape, std::move(data));
}

ProbMap ProbMap::Validate(Shape2 shape, std::vector<float> data) {
  if (shape.height == 0 || shape.width == 0) {
    throw Error(ErrorCode::kInvalidArgument, "prob map dims must be positive");
  }
  CheckLength(shape.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    // NaN fails both comparisons.
    if (!(data[i] >= 0.0f && data[i] <= 1.0f)) {
      std::ostringstream os;
      os << "prob map entry " << i << " = " << data[i] << " outside [0, 1]";
      throw Error(ErrorCode::kRangeViolation, os.str());
    }
    if (data[i] == 0.0f) data[i] = 0.0f;
  }
  return ProbMap(shape, std::move(data));
}

PooledGrid::PooledGrid(Shape3 shape, std::vector<float> data,
                       std::uint32_t samples_per_side)
    : shape_(shape), data_(std::move(data)),
      samples_per_side_(samples_per_side) {
  CheckLength(shape_.size(), data_.size());
}

RawTensor ToRaw(const FeatureMap& t) {
  return {{t.channels(), t.height(), t.width()},
          {t.data().begin(), t.data().end()}};
}

RawTensor ToRaw(const ProbMap& t) {
  return {{t.height(), t.width()}, {t.data().begin(), t.data().end()}};
}

RawTensor ToRaw(const PooledGrid& t) {
  return {{t.channels(), t.rows(), t.cols()},
          {t.data().begin(), t.data().end()}};
}

namespace {

void RequireRank(const RawTensor& raw, std::size_t rank, const char* what) {
  if (raw.dims.size() != rank) {
    std::ostringstream os;
    os << what << " needs " << rank << " dims, got " << raw.dims.size();
    throw Error(ErrorCode::kShapeMismatch, os.str());
  }
}

}  // namespace

FeatureMap FeatureMapFromRaw(RawTensor raw) {
  RequireRank(raw, 3, "feature map");
  return FeatureMap::Validate({raw.dims[0], raw.dims[1], raw.dims[2]},
                              std::move(raw.data));
}

ProbMap ProbMapFromRaw(RawTensor raw) {
  RequireRank(raw, 2, "prob map");
  return ProbMap::Validate({raw.dims[0], raw.dims[1]}, std::move(raw.data));
}

PooledGrid PooledGridFromRaw(RawTensor raw) {
  RequireRank(raw, 3, "pooled grid");
  return PooledGrid({raw.dims[0], raw.dims[1], raw.dims[2]},
                    std::move(raw.data));
}

}  // namespace sara
