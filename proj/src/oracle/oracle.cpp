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

#include <algorithm>
#include <cmath>

#include "sara/kernels.hpp"
#include "sara/synth.hpp"

namespace sara::oracle {

Feature64 Widen(const FeatureMap& feature) {
  return {feature.shape(), {feature.data().begin(), feature.data().end()}};
}

Prob64 Widen(const ProbMap& prob) {
  return {prob.shape(), {prob.data().begin(), prob.data().end()}};
}

namespace {

double Tent(double t) { return std::max(0.0, 1.0 - std::abs(t)); }

// f(a, b) = sum_{j,k} w(a, b, j, k) F(c, j, k) over the whole map.
double SampleFeature(const Feature64& f, std::uint32_t c, double a, double b) {
  const std::uint32_t H = f.shape.height;
  const std::uint32_t W = f.shape.width;
  double sum = 0.0;
  for (std::uint32_t j = 0; j < H; ++j) {
    const double wy = Tent(b - j);
    if (wy == 0.0) continue;
    for (std::uint32_t k = 0; k < W; ++k) {
      sum += Tent(a - k) * wy * f.data[(std::size_t{c} * H + j) * W + k];
    }
  }
  return sum;
}

// p(c, d) with (c, d) clamped into the map's cell-center range first.
double SampleProb(const Prob64& p, double c, double d) {
  const std::uint32_t H = p.shape.height;
  const std::uint32_t W = p.shape.width;
  c = std::min(std::max(c, 0.0), W - 1.0);
  d = std::min(std::max(d, 0.0), H - 1.0);
  double sum = 0.0;
  for (std::uint32_t j = 0; j < H; ++j) {
    for (std::uint32_t k = 0; k < W; ++k) {
      sum += Tent(c - k) * Tent(d - j) * p.data[std::size_t{j} * W + k];
    }
  }
  return sum;
}

Pooled64 Pool(const Feature64& feature, const RoiBox& roi, const Prob64* prob,
              const BinGrid& grid) {
  ValidateRoi(roi);
  ValidateGrid(grid);
  const std::uint32_t s = grid.samples_per_side;
  const double n = static_cast<double>(s) * s;
  const double roi_w = roi.x2 - roi.x1;
  const double roi_h = roi.y2 - roi.y1;
  Pooled64 out{{feature.shape.channels, grid.rows, grid.cols}, {}};
  out.data.reserve(out.shape.size());
  for (std::uint32_t c = 0; c < feature.shape.channels; ++c) {
    for (std::uint32_t h = 0; h < grid.rows; ++h) {
      for (std::uint32_t w = 0; w < grid.cols; ++w) {
        double sum = 0.0;
        for (std::uint32_t u = 0; u < s; ++u) {
          for (std::uint32_t v = 0; v < s; ++v) {
            const double a = roi.x1 + roi_w * (w * s + v + 0.5) / (grid.cols * s);
            const double b = roi.y1 + roi_h * (h * s + u + 0.5) / (grid.rows * s);
            double term = SampleFeature(feature, c, a, b);
            if (prob != nullptr) {
              const double pc = (a - roi.x1) * prob->shape.width / roi_w - 0.5;
              const double pd = (b - roi.y1) * prob->shape.height / roi_h - 0.5;
              term *= SampleProb(*prob, pc, pd);
            }
            sum += term;
          }
        }
        out.data.push_back(sum / n);
      }
    }
  }
  return out;
}

}  // namespace

Pooled64 RoiAlign(const Feature64& feature, const RoiBox& roi,
                  const BinGrid& grid) {
  return Pool(feature, roi, nullptr, grid);
}

Pooled64 SaRoiAlign(const Feature64& feature, const RoiBox& roi,
                    const Prob64& prob, const BinGrid& grid) {
  return Pool(feature, roi, &prob, grid);
}

double FiniteDiffGrad(const ScalarLoss& loss, std::span<const double> input,
                      std::size_t index, double eps,
                      std::optional<ProbeBounds> bounds) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
  }
  if (index >= input.size()) {
    throw Error(ErrorCode::kInvalidArgument, "probe index out of range");
  }
  std::vector<double> x(input.begin(), input.end());
  const double x0 = x[index];
  const bool lo_ok = !bounds || x0 - eps >= bounds->lo;
  const bool hi_ok = !bounds || x0 + eps <= bounds->hi;
  auto eval = [&](double v) {
    x[index] = v;
    return loss(x);
  };
  if (lo_ok && hi_ok) return (eval(x0 + eps) - eval(x0 - eps)) / (2.0 * eps);
  if (hi_ok) return (eval(x0 + eps) - eval(x0)) / eps;
  if (lo_ok) return (eval(x0) - eval(x0 - eps)) / eps;
  throw Error(ErrorCode::kInvalidArgument, "probe interval narrower than eps");
}

const char* KernelKindName(KernelKind kind) {
  return kind == KernelKind::kRoiAlign ? "roialign" : "sa";
}

const char* GradTargetName(GradTarget target) {
  return target == GradTarget::kFeature ? "feature" : "prob";
}

GradCheckInstance RandomGradCheckInstance(std::uint64_t seed, KernelKind kind) {
  synth::Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  synth::RandomCaseSpec spec;
  spec.feature_shape = {4, 8, 8};
  spec.prob_shape = {6, 6};
  spec.with_prob = kind == KernelKind::kShapeAware;
  spec.grid = {rng.UniformInt(1, 4), rng.UniformInt(1, 4), rng.UniformInt(1, 2)};
  auto rc = synth::GenRandomCase(seed, spec);

  GradCheckInstance inst{std::move(rc.feature), rc.roi, std::move(rc.prob),
                         rc.grid, {}};
  inst.seed.resize(std::size_t{4} * inst.grid.rows * inst.grid.cols);
  for (auto& w : inst.seed) w = static_cast<float>(rng.Uniform(-1.0, 1.0));
  return inst;
}

double RelativeError(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max(1e-6, std::abs(analytic) + std::abs(numeric));
}

GradCheckReport GradCheck(KernelKind kind, const GradCheckInstance& instance,
                          GradTarget target, double eps, double tolerance,
                          const GradTamper& tamper) {
  const bool shaped = kind == KernelKind::kShapeAware;
  if (shaped && !instance.prob) {
    throw Error(ErrorCode::kInvalidArgument, "shape-aware gradcheck needs a prob map");
  }
  if (!shaped && target == GradTarget::kProb) {
    throw Error(ErrorCode::kInvalidArgument, "RoIAlign has no prob gradient");
  }
  const Shape3 out_shape{instance.feature.channels(), instance.grid.rows,
                         instance.grid.cols};
  if (instance.seed.size() != out_shape.size()) {
    throw Error(ErrorCode::kShapeMismatch, "adjoint seed does not match output");
  }

  const PooledGrid grad_out(out_shape, instance.seed);
  GradBundle analytic =
      shaped ? kernels::SaRoiAlignBackward(grad_out, instance.feature, instance.roi,
                                           *instance.prob, instance.grid)
             : kernels::RoiAlignBackward(grad_out, instance.roi, instance.grid,
                                         instance.feature.shape());
  if (tamper) tamper(analytic);

  const std::vector<double> seed(instance.seed.begin(), instance.seed.end());
  auto weighted = [&seed](const Pooled64& out) {
    double l = 0.0;
    for (std::size_t i = 0; i < seed.size(); ++i) l += seed[i] * out.data[i];
    return l;
  };

  Feature64 feature = Widen(instance.feature);
  Prob64 prob = shaped ? Widen(*instance.prob) : Prob64{};
  std::vector<double> probe;
  std::span<const float> grads;
  std::optional<ProbeBounds> bounds;
  ScalarLoss loss;
  if (target == GradTarget::kFeature) {
    probe = feature.data;
    grads = analytic.grad_feature;
    loss = [&](std::span<const double> x) {
      Feature64 f{feature.shape, {x.begin(), x.end()}};
      return weighted(shaped ? SaRoiAlign(f, instance.roi, prob, instance.grid)
                             : RoiAlign(f, instance.roi, instance.grid));
    };
  } else {
    probe = prob.data;
    grads = analytic.grad_prob;
    bounds = ProbeBounds{0.0, 1.0};
    loss = [&](std::span<const double> x) {
      Prob64 p{prob.shape, {x.begin(), x.end()}};
      return weighted(SaRoiAlign(feature, instance.roi, p, instance.grid));
    };
  }

  GradCheckReport report;
  report.target = target;
  report.tolerance = tolerance;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double numeric = FiniteDiffGrad(loss, probe, i, eps, bounds);
    const double a = grads[i];
    const double rel = RelativeError(a, numeric);
    if (i == 0 || rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_index = i;
      report.analytic_value = a;
      report.numeric_value = numeric;
    }
  }
  report.pass = report.max_rel_error <= tolerance;
  return report;
}

}  // namespace sara::oracle
