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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sara/kernels.hpp"

namespace sara::kernels {

BilinearStencil FeatureStencil(double a, double b, std::uint32_t height,
                               std::uint32_t width) {
  BilinearStencil s;
  // At least one cell outside: every weight vanishes.
  if (!(a > -1.0 && a < static_cast<double>(width) && b > -1.0 &&
        b < static_cast<double>(height))) {
    return s;
  }
  const double x0 = std::floor(a);
  const double y0 = std::floor(b);
  const double lx = a - x0;
  const double ly = b - y0;
  const double wx[2] = {1.0 - lx, lx};
  const double wy[2] = {1.0 - ly, ly};
  const auto ix0 = static_cast<long long>(x0);
  const auto iy0 = static_cast<long long>(y0);
  for (int dy = 0; dy < 2; ++dy) {
    for (int dx = 0; dx < 2; ++dx) {
      const long long x = ix0 + dx;
      const long long y = iy0 + dy;
      const int k = dy * 2 + dx;
      if (x >= 0 && x < width && y >= 0 && y < height) {
        s.index[k] = static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x);
        s.weight[k] = wy[dy] * wx[dx];
      }
    }
  }
  return s;
}

namespace {

struct ClampedAxis {
  std::size_t lo;
  std::size_t hi;
  double w_lo;
  double w_hi;
};

ClampedAxis ClampAxis(double v, std::uint32_t dim) {
  const double top = static_cast<double>(dim - 1);
  v = std::clamp(v, 0.0, top);
  const double lo = std::floor(v);
  const auto ilo = static_cast<std::size_t>(lo);
  const double frac = v - lo;
  return {ilo, std::min<std::size_t>(ilo + 1, dim - 1), 1.0 - frac, frac};
}

}  // namespace

BilinearStencil ProbStencil(double c, double d, std::uint32_t height,
                            std::uint32_t width) {
  const auto x = ClampAxis(c, width);
  const auto y = ClampAxis(d, height);
  BilinearStencil s;
  s.index = {y.lo * width + x.lo, y.lo * width + x.hi, y.hi * width + x.lo,
             y.hi * width + x.hi};
  s.weight = {y.w_lo * x.w_lo, y.w_lo * x.w_hi, y.w_hi * x.w_lo,
              y.w_hi * x.w_hi};
  return s;
}

double BilinearSample(const FeatureMap& feature, double a, double b,
                      std::uint32_t channel) {
  if (channel >= feature.channels()) {
    throw Error(ErrorCode::kInvalidArgument,
                "channel " + std::to_string(channel) + " out of range");
  }
  const auto s = FeatureStencil(a, b, feature.height(), feature.width());
  const auto plane = feature.plane(channel);
  double f = 0.0;
  for (int k = 0; k < 4; ++k) f += s.weight[k] * plane[s.index[k]];
  return f;
}

std::vector<SamplePoint> MakeSamplePoints(const RoiBox& roi,
                                          const BinGrid& grid) {
  ValidateRoi(roi);
  ValidateGrid(grid);
  const std::uint32_t s = grid.samples_per_side;
  const double bin_w = roi.width() / grid.cols;
  const double bin_h = roi.height() / grid.rows;
  std::vector<SamplePoint> points;
  points.reserve(std::size_t{grid.rows} * grid.cols * s * s);
  for (std::uint32_t h = 0; h < grid.rows; ++h) {
    for (std::uint32_t w = 0; w < grid.cols; ++w) {
      for (std::uint32_t u = 0; u < s; ++u) {
        const double b = roi.y1 + bin_h * (h + (u + 0.5) / s);
        for (std::uint32_t v = 0; v < s; ++v) {
          const double a = roi.x1 + bin_w * (w + (v + 0.5) / s);
          points.push_back({a, b, h, w, u * s + v});
        }
      }
    }
  }
  return points;
}

ProbCoord RoiToProbCoords(double a, double b, const RoiBox& roi,
                          Shape2 prob_shape) {
  return {(a - roi.x1) / roi.width() * prob_shape.width - 0.5,
          (b - roi.y1) / roi.height() * prob_shape.height - 0.5};
}

double ProbSample(const ProbMap& prob, double c, double d) {
  const auto x = ClampAxis(c, prob.width());
  const auto y = ClampAxis(d, prob.height());
  const auto p = prob.data();
  const std::size_t w = prob.width();
  // Separable form: with P == 1 both inner and outer sums are exactly 1.
  const double top = x.w_lo * p[y.lo * w + x.lo] + x.w_hi * p[y.lo * w + x.hi];
  const double bottom = x.w_lo * p[y.hi * w + x.lo] + x.w_hi * p[y.hi * w + x.hi];
  return y.w_lo * top + y.w_hi * bottom;
}

namespace {

// Per-RoI precomputation shared by every channel.
struct SampleTable {
  std::vector<BilinearStencil> feature;
  std::vector<double> prob;                  // p at each sample (shaped only)
  std::vector<BilinearStencil> prob_stencil;  // for the P gradient
};

SampleTable BuildTable(Shape3 feature_shape, const RoiBox& roi,
                       const BinGrid& grid, const ProbMap* prob,
                       bool want_prob_stencil) {
  const auto points = MakeSamplePoints(roi, grid);
  SampleTable t;
  t.feature.reserve(points.size());
  for (const auto& pt : points) {
    t.feature.push_back(
        FeatureStencil(pt.a, pt.b, feature_shape.height, feature_shape.width));
  }
  if (prob != nullptr) {
    t.prob.reserve(points.size());
    for (const auto& pt : points) {
      const auto pc = RoiToProbCoords(pt.a, pt.b, roi, prob->shape());
      t.prob.push_back(ProbSample(*prob, pc.c, pc.d));
      if (want_prob_stencil) {
        t.prob_stencil.push_back(
            ProbStencil(pc.c, pc.d, prob->height(), prob->width()));
      }
    }
  }
  return t;
}

inline double Gather(const BilinearStencil& s, std::span<const float> plane) {
  return s.weight[0] * plane[s.index[0]] + s.weight[1] * plane[s.index[1]] +
         s.weight[2] * plane[s.index[2]] + s.weight[3] * plane[s.index[3]];
}

template <bool kShaped>
PooledGrid Forward(const FeatureMap& feature, const RoiBox& roi,
                   const ProbMap* prob, const BinGrid& grid) {
  const auto table = BuildTable(feature.shape(), roi, grid, prob, false);
  const std::size_t n = grid.samples_per_bin();
  const std::size_t bins = std::size_t{grid.rows} * grid.cols;
  std::vector<float> out(feature.channels() * bins);
  for (std::uint32_t c = 0; c < feature.channels(); ++c) {
    const auto plane = feature.plane(c);
    for (std::size_t bin = 0; bin < bins; ++bin) {
      double acc = 0.0;
      for (std::size_t i = bin * n; i < (bin + 1) * n; ++i) {
        const double f = Gather(table.feature[i], plane);
        if constexpr (kShaped) {
          acc += f * table.prob[i];
        } else {
          acc += f;
        }
      }
      out[c * bins + bin] = static_cast<float>(acc / static_cast<double>(n));
    }
  }
  return PooledGrid({feature.channels(), grid.rows, grid.cols}, std::move(out),
                    grid.samples_per_side);
}

void CheckGradOut(const PooledGrid& grad_out, const BinGrid& grid,
                  std::uint32_t channels) {
  if (grad_out.channels() != channels || grad_out.rows() != grid.rows ||
      grad_out.cols() != grid.cols) {
    std::ostringstream os;
    os << "grad_out shape " << grad_out.channels() << "x" << grad_out.rows()
       << "x" << grad_out.cols() << " does not match " << channels << "x"
       << grid.rows << "x" << grid.cols;
    throw Error(ErrorCode::kShapeMismatch, os.str());
  }
}

std::vector<float> Narrow(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

PooledGrid RoiAlignForward(const FeatureMap& feature, const RoiBox& roi,
                           const BinGrid& grid) {
  return Forward<false>(feature, roi, nullptr, grid);
}

PooledGrid SaRoiAlignForward(const FeatureMap& feature, const RoiBox& roi,
                             const ProbMap& prob, const BinGrid& grid) {
  return Forward<true>(feature, roi, &prob, grid);
}

GradBundle RoiAlignBackward(const PooledGrid& grad_out, const RoiBox& roi,
                            const BinGrid& grid, Shape3 feature_shape) {
  if (feature_shape.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "feature dims must be positive");
  }
  CheckGradOut(grad_out, grid, feature_shape.channels);
  const auto table = BuildTable(feature_shape, roi, grid, nullptr, false);
  const std::size_t n = grid.samples_per_bin();
  const std::size_t bins = std::size_t{grid.rows} * grid.cols;
  const std::size_t plane_size = std::size_t{feature_shape.height} * feature_shape.width;
  const auto go = grad_out.data();

  std::vector<double> gf(feature_shape.size(), 0.0);
  for (std::uint32_t c = 0; c < feature_shape.channels; ++c) {
    double* plane = gf.data() + c * plane_size;
    for (std::size_t bin = 0; bin < bins; ++bin) {
      const double g = go[c * bins + bin] / static_cast<double>(n);
      for (std::size_t i = bin * n; i < (bin + 1) * n; ++i) {
        const auto& s = table.feature[i];
        for (int k = 0; k < 4; ++k) plane[s.index[k]] += g * s.weight[k];
      }
    }
  }
  GradBundle out;
  out.feature_shape = feature_shape;
  out.grad_feature = Narrow(gf);
  return out;
}

GradBundle SaRoiAlignBackward(const PooledGrid& grad_out,
                              const FeatureMap& feature, const RoiBox& roi,
                              const ProbMap& prob, const BinGrid& grid) {
  CheckGradOut(grad_out, grid, feature.channels());
  const auto table = BuildTable(feature.shape(), roi, grid, &prob, true);
  const std::size_t n = grid.samples_per_bin();
  const std::size_t bins = std::size_t{grid.rows} * grid.cols;
  const std::size_t plane_size = std::size_t{feature.height()} * feature.width();
  const auto go = grad_out.data();

  std::vector<double> gf(feature.shape().size(), 0.0);
  // d loss / d p at every sample, summed over channels.
  std::vector<double> gp_sample(bins * n, 0.0);
  for (std::uint32_t c = 0; c < feature.channels(); ++c) {
    const auto fplane = feature.plane(c);
    double* gplane = gf.data() + c * plane_size;
    for (std::size_t bin = 0; bin < bins; ++bin) {
      const double g = go[c * bins + bin] / static_cast<double>(n);
      for (std::size_t i = bin * n; i < (bin + 1) * n; ++i) {
        const auto& s = table.feature[i];
        const double gw = g * table.prob[i];
        for (int k = 0; k < 4; ++k) gplane[s.index[k]] += gw * s.weight[k];
        gp_sample[i] += g * Gather(s, fplane);
      }
    }
  }
  std::vector<double> gp(prob.shape().size(), 0.0);
  for (std::size_t i = 0; i < gp_sample.size(); ++i) {
    const auto& s = table.prob_stencil[i];
    for (int k = 0; k < 4; ++k) gp[s.index[k]] += gp_sample[i] * s.weight[k];
  }
  GradBundle out;
  out.feature_shape = feature.shape();
  out.grad_feature = Narrow(gf);
  out.prob_shape = prob.shape();
  out.grad_prob = Narrow(gp);
  return out;
}

}  // namespace sara::kernels
