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

#include "sara/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "sara/format.hpp"
#include "sara/kernels.hpp"
#include "sara/refine.hpp"

namespace sara::synth {

double Rng::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

std::uint32_t Rng::UniformInt(std::uint32_t lo, std::uint32_t hi) {
  const std::uint64_t span = std::uint64_t{hi} - lo + 1;
  return lo + static_cast<std::uint32_t>(NextU64() % span);
}

double Rng::Normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  const double u1 = 1.0 - Uniform();  // (0, 1]
  const double u2 = Uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(t);
  return r * std::cos(t);
}

namespace {

double OverlapFraction(const RoiBox& roi, std::uint32_t height,
                       std::uint32_t width) {
  const double iw = std::min(roi.x2, width - 0.5) - std::max(roi.x1, -0.5);
  const double ih = std::min(roi.y2, height - 0.5) - std::max(roi.y1, -0.5);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih / roi.area();
}

RoiBox DrawRoi(Rng& rng, std::uint32_t height, std::uint32_t width) {
  const double W = width;
  const double H = height;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double w = rng.Uniform(0.5, 1.25 * W);
    const double h = rng.Uniform(0.5, 1.25 * H);
    const double x1 = rng.Uniform(-0.5 - 0.5 * w, W - 0.5 - 0.5 * w);
    const double y1 = rng.Uniform(-0.5 - 0.5 * h, H - 0.5 - 0.5 * h);
    const RoiBox roi{x1, y1, x1 + w, y1 + h};
    if (OverlapFraction(roi, height, width) >= 0.5) return roi;
  }
  return {-0.5, -0.5, W - 0.5, H - 0.5};
}

}  // namespace

std::vector<RoiBox> GenRandomRois(std::uint64_t seed, Shape2 map_shape,
                                  std::size_t count) {
  if (map_shape.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "map dims must be positive");
  }
  Rng rng(seed);
  std::vector<RoiBox> rois;
  rois.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    rois.push_back(DrawRoi(rng, map_shape.height, map_shape.width));
  }
  return rois;
}

RandomCase GenRandomCase(std::uint64_t seed, const RandomCaseSpec& spec) {
  const auto& fs = spec.feature_shape;
  if (fs.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "random case dims must be positive");
  }
  if (spec.with_prob && spec.prob_shape.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "prob dims must be positive");
  }
  if (!(spec.feature_hi > spec.feature_lo)) {
    throw Error(ErrorCode::kInvalidArgument, "empty feature value range");
  }
  ValidateGrid(spec.grid);

  Rng rng(seed);
  RandomCase rc;
  rc.seed = seed;
  rc.grid = spec.grid;

  std::vector<float> data(fs.size());
  for (auto& v : data) {
    v = static_cast<float>(rng.Uniform(spec.feature_lo, spec.feature_hi));
  }
  rc.feature = FeatureMap::Validate(fs, std::move(data));

  rc.roi = DrawRoi(rng, fs.height, fs.width);

  if (spec.with_prob) {
    std::vector<float> p(spec.prob_shape.size());
    for (auto& v : p) v = static_cast<float>(rng.Uniform());
    rc.prob = ProbMap::Validate(spec.prob_shape, std::move(p));
  }
  return rc;
}

namespace {

// Gram-Schmidt on two seeded Gaussian vectors.
std::pair<std::vector<double>, std::vector<double>> OrthonormalPair(
    std::uint32_t dim, Rng& rng) {
  auto normalize = [](std::vector<double>& v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (double& x : v) x /= n;
  };
  std::vector<double> a(dim), b(dim);
  for (auto& x : a) x = rng.Normal();
  normalize(a);
  for (;;) {
    for (auto& x : b) x = rng.Normal();
    double dot = 0.0;
    for (std::uint32_t i = 0; i < dim; ++i) dot += a[i] * b[i];
    for (std::uint32_t i = 0; i < dim; ++i) b[i] -= dot * a[i];
    double n = 0.0;
    for (double x : b) n += x * x;
    if (n > 1e-6) break;
  }
  normalize(b);
  return {std::move(a), std::move(b)};
}

RoiBox CellBox(std::uint32_t col0, std::uint32_t row0, std::uint32_t w,
               std::uint32_t h) {
  return {col0 - 0.5, row0 - 0.5, col0 + w - 0.5, row0 + h - 0.5};
}

void Require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInfeasibleGeometry, what);
}

}  // namespace

void CheckHuddleInvariants(const HuddleScenario& s) {
  using refine::Iou;
  const auto a = s.mask_a.data();
  const auto b = s.mask_b.data();
  Require(a.size() == b.size(), "mask shapes differ");
  for (std::size_t i = 0; i < a.size(); ++i) {
    Require(std::min(a[i], b[i]) == 0.0f, "instance masks overlap");
  }
  for (const auto* roi : {&s.roi_1, &s.roi_2}) {
    Require(Iou(*roi, s.gt_a) > 0.0 && Iou(*roi, s.gt_b) > 0.0,
            "a RoI does not straddle both instances");
  }
  Require(Iou(s.roi_1, s.gt_a) >= 0.5, "iou(roi_1, gt_a) < 0.5");
  Require(Iou(s.roi_2, s.gt_b) >= 0.5, "iou(roi_2, gt_b) < 0.5");
  Require(Iou(s.roi_1, s.roi_2) >= 0.7, "iou(roi_1, roi_2) < 0.7");
}

HuddleScenario GenHuddle(const HuddleParams& params) {
  const auto& p = params;
  Require(p.instance_width > 0 && p.instance_height > 0,
          "instance dims must be positive");
  Require(p.signature_dim >= 2, "signature_dim must be >= 2");
  Require(std::isfinite(p.sigma) && p.sigma >= 0.0, "sigma must be >= 0");
  Require(p.mask_crop.size() > 0, "mask crop dims must be positive");
  const std::uint64_t span = 2ull * p.instance_width + p.gap;
  Require(span <= p.map_width && p.instance_height <= p.map_height,
          "map too small for both instances");

  Rng rng(p.seed);
  HuddleScenario s;
  s.params = p;
  std::tie(s.signature_a, s.signature_b) = OrthonormalPair(p.signature_dim, rng);

  const auto col_a = static_cast<std::uint32_t>((p.map_width - span) / 2);
  const std::uint32_t col_b = col_a + p.instance_width + p.gap;
  const std::uint32_t row0 = (p.map_height - p.instance_height) / 2;
  s.gt_a = CellBox(col_a, row0, p.instance_width, p.instance_height);
  s.gt_b = CellBox(col_b, row0, p.instance_width, p.instance_height);

  const std::size_t plane = std::size_t{p.map_height} * p.map_width;
  std::vector<float> mask_a(plane, 0.0f), mask_b(plane, 0.0f);
  for (std::uint32_t y = row0; y < row0 + p.instance_height; ++y) {
    for (std::uint32_t x = 0; x < p.instance_width; ++x) {
      mask_a[std::size_t{y} * p.map_width + col_a + x] = 1.0f;
      mask_b[std::size_t{y} * p.map_width + col_b + x] = 1.0f;
    }
  }

  std::vector<float> feat(std::size_t{p.signature_dim} * plane);
  for (std::uint32_t c = 0; c < p.signature_dim; ++c) {
    for (std::size_t i = 0; i < plane; ++i) {
      double v = mask_a[i] * s.signature_a[c] + mask_b[i] * s.signature_b[c];
      if (p.sigma > 0.0) v += p.sigma * rng.Normal();
      feat[c * plane + i] = static_cast<float>(v);
    }
  }
  s.feature = FeatureMap::Validate({p.signature_dim, p.map_height, p.map_width},
                                   std::move(feat));
  s.mask_a = ProbMap::Validate({p.map_height, p.map_width}, std::move(mask_a));
  s.mask_b = ProbMap::Validate({p.map_height, p.map_width}, std::move(mask_b));

  // Each RoI starts at its instance's outer edge and reaches across into the
  // neighbour; sub-pixel jitter is redrawn until every invariant holds.
  const double len = p.roi_scale * p.instance_width;
  for (int attempt = 0;; ++attempt) {
    const double j[4] = {rng.Uniform(-0.2, 0.2), rng.Uniform(-0.2, 0.2),
                         rng.Uniform(-0.2, 0.2), rng.Uniform(-0.2, 0.2)};
    s.roi_1 = {s.gt_a.x1 + j[0], s.gt_a.y1 + j[1], s.gt_a.x1 + len + j[0],
               s.gt_a.y2 + j[1]};
    s.roi_2 = {s.gt_b.x2 - len + j[2], s.gt_b.y1 + j[3], s.gt_b.x2 + j[2],
               s.gt_b.y2 + j[3]};
    try {
      CheckHuddleInvariants(s);
      return s;
    } catch (const Error&) {
      if (attempt == 100) throw;
    }
  }
}

ProbMap CropMaskToRoi(const ProbMap& global_mask, const RoiBox& roi,
                      Shape2 crop_shape) {
  ValidateRoi(roi);
  if (crop_shape.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "crop dims must be positive");
  }
  const auto src = global_mask.data();
  std::vector<float> out(crop_shape.size());
  for (std::uint32_t r = 0; r < crop_shape.height; ++r) {
    const double b = roi.y1 + (r + 0.5) / crop_shape.height * roi.height();
    for (std::uint32_t c = 0; c < crop_shape.width; ++c) {
      const double a = roi.x1 + (c + 0.5) / crop_shape.width * roi.width();
      const auto st = kernels::FeatureStencil(a, b, global_mask.height(),
                                              global_mask.width());
      double v = 0.0;
      for (int k = 0; k < 4; ++k) v += st.weight[k] * src[st.index[k]];
      out[std::size_t{r} * crop_shape.width + c] =
          static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return ProbMap::Validate(crop_shape, std::move(out));
}

double CosineSimilarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kShapeMismatch, "cosine of vectors of different length");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += double{a[i]} * b[i];
    na += double{a[i]} * a[i];
    nb += double{b[i]} * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::kUndefinedSimilarity,
                "cosine similarity of a zero vector is undefined");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

Separability FeatureSeparability(const HuddleScenario& s, const BinGrid& grid) {
  const auto plain_1 = kernels::RoiAlignForward(s.feature, s.roi_1, grid);
  const auto plain_2 = kernels::RoiAlignForward(s.feature, s.roi_2, grid);
  const auto crop_a = CropMaskToRoi(s.mask_a, s.roi_1, s.params.mask_crop);
  const auto crop_b = CropMaskToRoi(s.mask_b, s.roi_2, s.params.mask_crop);
  const auto shaped_1 = kernels::SaRoiAlignForward(s.feature, s.roi_1, crop_a, grid);
  const auto shaped_2 = kernels::SaRoiAlignForward(s.feature, s.roi_2, crop_b, grid);
  return {CosineSimilarity(plain_1.data(), plain_2.data()),
          CosineSimilarity(shaped_1.data(), shaped_2.data())};
}

void ExportHuddle(const HuddleScenario& s, const std::string& directory) {
  namespace fs = std::filesystem;
  const fs::path dir(directory);
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kIoError, directory + " is not a directory");
  }
  WriteTensorFile(ToRaw(s.feature), (dir / "feature.sara").string());
  WriteTensorFile(ToRaw(s.mask_a), (dir / "mask_a.sara").string());
  WriteTensorFile(ToRaw(s.mask_b), (dir / "mask_b.sara").string());

  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  doc["seed"] = s.params.seed;
  doc["sigma"] = s.params.sigma;
  doc["signature_dim"] = s.params.signature_dim;
  auto& boxes = doc["boxes"] = nlohmann::ordered_json::array();
  auto box = [&boxes](const RoiBox& b, const char* role) {
    boxes.push_back({{"x1", b.x1}, {"y1", b.y1}, {"x2", b.x2}, {"y2", b.y2},
                     {"role", role}});
  };
  box(s.gt_a, "gt_a");
  box(s.gt_b, "gt_b");
  box(s.roi_1, "roi_1");
  box(s.roi_2, "roi_2");

  std::ofstream out(dir / "scenario.json");
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "cannot write scenario.json");
}

}  // namespace sara::synth
