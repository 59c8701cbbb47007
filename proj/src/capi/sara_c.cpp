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

#include "sara/sara.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <variant>

#include "sara/format.hpp"
#include "sara/kernels.hpp"
#include "sara/oracle.hpp"
#include "sara/refine.hpp"
#include "sara/synth.hpp"

struct sara_tensor {
  sara_tensor_kind kind;
  std::variant<sara::RawTensor, sara::FeatureMap, sara::ProbMap,
               sara::PooledGrid>
      value;
  std::vector<std::uint32_t> dims;
  std::span<const float> data;
};

struct sara_batch_result {
  struct Slot {
    sara_status status = SARA_OK;
    std::string message;
    sara_tensor* output = nullptr;
    sara_tensor* grad_feature = nullptr;
    sara_tensor* grad_prob = nullptr;
  };
  std::vector<Slot> slots;
  std::uint64_t checksum = 0;

  sara_batch_result() = default;
  sara_batch_result(const sara_batch_result&) = delete;
  sara_batch_result& operator=(const sara_batch_result&) = delete;
  ~sara_batch_result() {
    for (auto& s : slots) {
      delete s.output;
      delete s.grad_feature;
      delete s.grad_prob;
    }
  }
};

struct sara_huddle {
  sara::synth::HuddleScenario scenario;
};

namespace {

using sara::ErrorCode;

thread_local std::string g_last_error;

sara_status ToStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return SARA_OK;
    case ErrorCode::kInvalidArgument: return SARA_ERR_INVALID_ARGUMENT;
    case ErrorCode::kLengthMismatch: return SARA_ERR_LENGTH_MISMATCH;
    case ErrorCode::kNonFiniteValue: return SARA_ERR_NON_FINITE;
    case ErrorCode::kRangeViolation: return SARA_ERR_RANGE;
    case ErrorCode::kShapeMismatch: return SARA_ERR_SHAPE_MISMATCH;
    case ErrorCode::kBadMagic: return SARA_ERR_BAD_MAGIC;
    case ErrorCode::kUnsupportedVersion: return SARA_ERR_UNSUPPORTED_VERSION;
    case ErrorCode::kTruncatedStream: return SARA_ERR_TRUNCATED;
    case ErrorCode::kIoError: return SARA_ERR_IO;
    case ErrorCode::kInfeasibleGeometry: return SARA_ERR_INFEASIBLE_GEOMETRY;
    case ErrorCode::kUndefinedSimilarity: return SARA_ERR_UNDEFINED_SIMILARITY;
  }
  return SARA_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
sara_status Guard(Fn&& fn) {
  try {
    fn();
    return SARA_OK;
  } catch (const sara::Error& e) {
    g_last_error = e.what();
    return ToStatus(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  }
  return SARA_ERR_INTERNAL;
}

void Require(bool ok, const char* what) {
  if (!ok) throw sara::Error(ErrorCode::kInvalidArgument, what);
}

sara_tensor* Wrap(sara::RawTensor t) {
  auto* h = new sara_tensor{SARA_TENSOR_RAW, std::move(t), {}, {}};
  const auto& raw = std::get<sara::RawTensor>(h->value);
  h->dims = raw.dims;
  h->data = raw.data;
  return h;
}

template <typename T>
sara_tensor* Wrap(sara_tensor_kind kind, T t) {
  auto* h = new sara_tensor{kind, std::move(t), {}, {}};
  const auto& v = std::get<T>(h->value);
  h->dims = sara::ToRaw(v).dims;
  h->data = v.data();
  return h;
}

sara_tensor* WrapValidated(sara_tensor_kind kind, sara::RawTensor raw) {
  switch (kind) {
    case SARA_TENSOR_RAW:
      return Wrap(std::move(raw));
    case SARA_TENSOR_FEATURE_MAP:
      return Wrap(kind, sara::FeatureMapFromRaw(std::move(raw)));
    case SARA_TENSOR_PROB_MAP:
      return Wrap(kind, sara::ProbMapFromRaw(std::move(raw)));
    case SARA_TENSOR_POOLED:
      return Wrap(kind, sara::PooledGridFromRaw(std::move(raw)));
  }
  throw sara::Error(ErrorCode::kInvalidArgument, "unknown tensor kind");
}

sara::RawTensor RawOf(const sara_tensor* t) {
  return {t->dims, {t->data.begin(), t->data.end()}};
}

const sara::FeatureMap& AsFeature(const sara_tensor* t) {
  Require(t != nullptr, "feature map handle is null");
  if (t->kind != SARA_TENSOR_FEATURE_MAP) {
    throw sara::Error(ErrorCode::kInvalidArgument, "tensor is not a feature map");
  }
  return std::get<sara::FeatureMap>(t->value);
}

const sara::ProbMap& AsProb(const sara_tensor* t) {
  Require(t != nullptr, "prob map handle is null");
  if (t->kind != SARA_TENSOR_PROB_MAP) {
    throw sara::Error(ErrorCode::kInvalidArgument, "tensor is not a prob map");
  }
  return std::get<sara::ProbMap>(t->value);
}

sara::PooledGrid AsPooled(const sara_tensor* t) {
  Require(t != nullptr, "pooled grid handle is null");
  if (t->kind == SARA_TENSOR_POOLED) return std::get<sara::PooledGrid>(t->value);
  return sara::PooledGridFromRaw(RawOf(t));
}

sara::RoiBox ToRoi(const sara_roi& r) { return {r.x1, r.y1, r.x2, r.y2}; }
sara_roi FromRoi(const sara::RoiBox& r) { return {r.x1, r.y1, r.x2, r.y2}; }

sara::BinGrid ToGrid(const sara_bin_grid& g) {
  return {g.rows, g.cols, g.samples_per_side};
}

std::vector<float> Copy(const float* data, std::size_t len) {
  Require(data != nullptr || len == 0, "data pointer is null");
  return std::vector<float>(data, data + len);
}

sara_tensor* WrapGrad(std::vector<std::uint32_t> dims, std::vector<float> data) {
  return Wrap(sara::RawTensor{std::move(dims), std::move(data)});
}

void Fnv(std::uint64_t& h, const void* p, std::size_t n) {
  const auto* b = static_cast<const unsigned char*>(p);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= b[i];
    h *= 0x100000001b3ull;
  }
}

void FnvTensor(std::uint64_t& h, const sara_tensor* t) {
  if (t == nullptr) return;
  for (auto d : t->dims) Fnv(h, &d, sizeof d);
  for (float v : t->data) Fnv(h, &v, sizeof v);
}

}  // namespace

extern "C" {

const char* sara_version(void) { return "1.0.0"; }

const char* sara_status_name(sara_status status) {
  switch (status) {
    case SARA_OK: return "OK";
    case SARA_ERR_INVALID_ARGUMENT: return "INVALID_ARGUMENT";
    case SARA_ERR_LENGTH_MISMATCH: return "LENGTH_MISMATCH";
    case SARA_ERR_NON_FINITE: return "NON_FINITE";
    case SARA_ERR_RANGE: return "RANGE";
    case SARA_ERR_SHAPE_MISMATCH: return "SHAPE_MISMATCH";
    case SARA_ERR_BAD_MAGIC: return "BAD_MAGIC";
    case SARA_ERR_UNSUPPORTED_VERSION: return "UNSUPPORTED_VERSION";
    case SARA_ERR_TRUNCATED: return "TRUNCATED";
    case SARA_ERR_IO: return "IO";
    case SARA_ERR_INFEASIBLE_GEOMETRY: return "INFEASIBLE_GEOMETRY";
    case SARA_ERR_UNDEFINED_SIMILARITY: return "UNDEFINED_SIMILARITY";
    case SARA_ERR_INTERNAL: return "INTERNAL";
  }
  return "UNKNOWN";
}

const char* sara_last_error(void) { return g_last_error.c_str(); }

// ---- tensors ---------------------------------------------------------------

sara_status sara_feature_map_create(uint32_t channels, uint32_t height,
                                    uint32_t width, const float* data,
                                    size_t len, sara_tensor** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    *out = Wrap(SARA_TENSOR_FEATURE_MAP,
                sara::FeatureMap::Validate({channels, height, width},
                                           Copy(data, len)));
  });
}

sara_status sara_prob_map_create(uint32_t height, uint32_t width,
                                 const float* data, size_t len,
                                 sara_tensor** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    *out = Wrap(SARA_TENSOR_PROB_MAP,
                sara::ProbMap::Validate({height, width}, Copy(data, len)));
  });
}

sara_status sara_pooled_create(uint32_t channels, uint32_t rows, uint32_t cols,
                               const float* data, size_t len,
                               sara_tensor** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    *out = Wrap(SARA_TENSOR_POOLED,
                sara::PooledGrid({channels, rows, cols}, Copy(data, len)));
  });
}

void sara_tensor_destroy(sara_tensor* t) { delete t; }

sara_tensor_kind sara_tensor_get_kind(const sara_tensor* t) { return t->kind; }
size_t sara_tensor_ndim(const sara_tensor* t) { return t->dims.size(); }
uint32_t sara_tensor_dim(const sara_tensor* t, size_t axis) {
  return axis < t->dims.size() ? t->dims[axis] : 0;
}
size_t sara_tensor_size(const sara_tensor* t) { return t->data.size(); }
const float* sara_tensor_data(const sara_tensor* t) { return t->data.data(); }

sara_status sara_tensor_read_file(const char* path, sara_tensor_kind kind,
                                  sara_tensor** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    *out = WrapValidated(kind, sara::ReadTensorFile(path));
  });
}

sara_status sara_tensor_write_file(const sara_tensor* t, const char* path,
                                   size_t* bytes_written) {
  return Guard([&] {
    Require(t != nullptr && path != nullptr, "null argument");
    const auto n = sara::WriteTensorFile(RawOf(t), path);
    if (bytes_written) *bytes_written = n;
  });
}

sara_status sara_tensor_encode(const sara_tensor* t, uint8_t* buf, size_t cap,
                               size_t* needed) {
  return Guard([&] {
    Require(t != nullptr && needed != nullptr, "null argument");
    const auto bytes = sara::EncodeTensor(RawOf(t));
    *needed = bytes.size();
    if (buf != nullptr && cap >= bytes.size()) {
      std::memcpy(buf, bytes.data(), bytes.size());
    } else if (buf != nullptr) {
      throw sara::Error(ErrorCode::kInvalidArgument, "buffer too small");
    }
  });
}

sara_status sara_tensor_decode(const uint8_t* buf, size_t len,
                               sara_tensor_kind kind, sara_tensor** out) {
  return Guard([&] {
    Require(buf != nullptr && out != nullptr, "null argument");
    *out = WrapValidated(kind, sara::DecodeTensor({buf, len}));
  });
}

// ---- kernels ---------------------------------------------------------------

sara_status sara_roi_align_forward(const sara_tensor* feature, sara_roi roi,
                                   sara_bin_grid grid, sara_tensor** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    *out = Wrap(SARA_TENSOR_POOLED,
                sara::kernels::RoiAlignForward(AsFeature(feature), ToRoi(roi),
                                               ToGrid(grid)));
  });
}

sara_status sara_sa_roi_align_forward(const sara_tensor* feature, sara_roi roi,
                                      const sara_tensor* prob,
                                      sara_bin_grid grid, sara_tensor** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    *out = Wrap(SARA_TENSOR_POOLED,
                sara::kernels::SaRoiAlignForward(AsFeature(feature), ToRoi(roi),
                                                 AsProb(prob), ToGrid(grid)));
  });
}

sara_status sara_roi_align_backward(const sara_tensor* grad_out, sara_roi roi,
                                    sara_bin_grid grid, uint32_t channels,
                                    uint32_t height, uint32_t width,
                                    sara_tensor** grad_feature) {
  return Guard([&] {
    Require(grad_feature != nullptr, "out is null");
    auto g = sara::kernels::RoiAlignBackward(AsPooled(grad_out), ToRoi(roi),
                                             ToGrid(grid),
                                             {channels, height, width});
    *grad_feature = WrapGrad({channels, height, width}, std::move(g.grad_feature));
  });
}

sara_status sara_sa_roi_align_backward(const sara_tensor* grad_out,
                                       const sara_tensor* feature, sara_roi roi,
                                       const sara_tensor* prob,
                                       sara_bin_grid grid,
                                       sara_tensor** grad_feature,
                                       sara_tensor** grad_prob) {
  return Guard([&] {
    Require(grad_feature != nullptr && grad_prob != nullptr, "out is null");
    const auto& f = AsFeature(feature);
    const auto& p = AsProb(prob);
    auto g = sara::kernels::SaRoiAlignBackward(AsPooled(grad_out), f,
                                               ToRoi(roi), p, ToGrid(grid));
    auto* gf = WrapGrad({f.channels(), f.height(), f.width()},
                        std::move(g.grad_feature));
    *grad_prob = WrapGrad({p.height(), p.width()}, std::move(g.grad_prob));
    *grad_feature = gf;
  });
}

// ---- batch -----------------------------------------------------------------

sara_status sara_batch_run(const sara_batch_job* jobs, size_t n_jobs,
                           sara_batch_mode mode, unsigned workers,
                           sara_batch_result** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    Require(jobs != nullptr || n_jobs == 0, "jobs is null");
    Require(mode == SARA_BATCH_FORWARD || mode == SARA_BATCH_FORWARD_BACKWARD,
            "unknown batch mode");

    // Handle-level problems become per-slot errors, like kernel errors.
    std::vector<sara::kernels::BatchJob> native(n_jobs);
    std::vector<std::string> pre_error(n_jobs);
    std::vector<sara::PooledGrid> grads(n_jobs);
    for (size_t i = 0; i < n_jobs; ++i) {
      const auto& j = jobs[i];
      auto& nj = native[i];
      nj.roi = ToRoi(j.roi);
      nj.grid = ToGrid(j.grid);
      try {
        nj.feature = &AsFeature(j.feature);
        if (j.prob != nullptr) nj.prob = &AsProb(j.prob);
        if (j.grad_out != nullptr) {
          grads[i] = AsPooled(j.grad_out);
          nj.grad_out = &grads[i];
        }
      } catch (const sara::Error& e) {
        nj.feature = nullptr;
        pre_error[i] = e.what();
      }
    }
    const auto results = sara::kernels::BatchRun(
        native,
        mode == SARA_BATCH_FORWARD ? sara::kernels::BatchMode::kForward
                                   : sara::kernels::BatchMode::kForwardBackward,
        workers);

    auto r = std::make_unique<sara_batch_result>();
    r->slots.resize(n_jobs);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (size_t i = 0; i < n_jobs; ++i) {
      auto& slot = r->slots[i];
      const auto& res = results[i];
      slot.status = ToStatus(res.status);
      slot.message = pre_error[i].empty() ? res.message : pre_error[i];
      if (res.ok()) {
        slot.output = Wrap(SARA_TENSOR_POOLED, res.output);
        if (res.grads) {
          const auto& g = *res.grads;
          const auto& fs = g.feature_shape;
          slot.grad_feature = WrapGrad({fs.channels, fs.height, fs.width}, g.grad_feature);
          if (g.prob_shape) {
            slot.grad_prob = WrapGrad({g.prob_shape->height, g.prob_shape->width},
                                      g.grad_prob);
          }
        }
      }
      const auto status = static_cast<std::int32_t>(slot.status);
      Fnv(h, &status, sizeof status);
      FnvTensor(h, slot.output);
      FnvTensor(h, slot.grad_feature);
      FnvTensor(h, slot.grad_prob);
    }
    r->checksum = h;
    *out = r.release();
  });
}

size_t sara_batch_result_count(const sara_batch_result* r) {
  return r->slots.size();
}
sara_status sara_batch_result_status(const sara_batch_result* r, size_t i) {
  return i < r->slots.size() ? r->slots[i].status : SARA_ERR_INVALID_ARGUMENT;
}
const char* sara_batch_result_message(const sara_batch_result* r, size_t i) {
  return i < r->slots.size() ? r->slots[i].message.c_str() : "";
}
const sara_tensor* sara_batch_result_output(const sara_batch_result* r, size_t i) {
  return i < r->slots.size() ? r->slots[i].output : nullptr;
}
const sara_tensor* sara_batch_result_grad_feature(const sara_batch_result* r,
                                                  size_t i) {
  return i < r->slots.size() ? r->slots[i].grad_feature : nullptr;
}
const sara_tensor* sara_batch_result_grad_prob(const sara_batch_result* r,
                                               size_t i) {
  return i < r->slots.size() ? r->slots[i].grad_prob : nullptr;
}
uint64_t sara_batch_result_checksum(const sara_batch_result* r) {
  return r->checksum;
}
void sara_batch_result_destroy(sara_batch_result* r) { delete r; }

// ---- oracle ----------------------------------------------------------------

namespace {

void CopyOut(const sara::oracle::Pooled64& p, double* out, size_t cap) {
  Require(out != nullptr, "out is null");
  if (cap < p.data.size()) {
    throw sara::Error(ErrorCode::kInvalidArgument, "output buffer too small");
  }
  std::memcpy(out, p.data.data(), p.data.size() * sizeof(double));
}

}  // namespace

sara_status sara_oracle_roi_align(const sara_tensor* feature, sara_roi roi,
                                  sara_bin_grid grid, double* out, size_t cap) {
  return Guard([&] {
    const auto f = sara::oracle::Widen(AsFeature(feature));
    CopyOut(sara::oracle::RoiAlign(f, ToRoi(roi), ToGrid(grid)), out, cap);
  });
}

sara_status sara_oracle_sa_roi_align(const sara_tensor* feature, sara_roi roi,
                                     const sara_tensor* prob,
                                     sara_bin_grid grid, double* out,
                                     size_t cap) {
  return Guard([&] {
    const auto f = sara::oracle::Widen(AsFeature(feature));
    const auto p = sara::oracle::Widen(AsProb(prob));
    CopyOut(sara::oracle::SaRoiAlign(f, ToRoi(roi), p, ToGrid(grid)), out, cap);
  });
}

sara_status sara_gradcheck_random(sara_kernel_kind kind, uint64_t seed,
                                  sara_grad_target target, double eps,
                                  double tolerance,
                                  sara_gradcheck_report* out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    Require(kind == SARA_KERNEL_ROIALIGN || kind == SARA_KERNEL_SA,
            "unknown kernel kind");
    Require(target == SARA_TARGET_FEATURE || target == SARA_TARGET_PROB,
            "unknown gradient target");
    Require(tolerance >= 0.0, "tolerance must be >= 0");
    using sara::oracle::GradTarget;
    using sara::oracle::KernelKind;
    const auto k = kind == SARA_KERNEL_SA ? KernelKind::kShapeAware
                                          : KernelKind::kRoiAlign;
    const auto inst = sara::oracle::RandomGradCheckInstance(seed, k);
    const auto rep = sara::oracle::GradCheck(
        k, inst,
        target == SARA_TARGET_PROB ? GradTarget::kProb : GradTarget::kFeature,
        eps, tolerance);
    *out = {target,     rep.max_rel_error, rep.worst_index, rep.analytic_value,
            rep.numeric_value, rep.tolerance, rep.pass ? 1 : 0};
  });
}

// ---- synth -----------------------------------------------------------------

sara_status sara_random_feature_map(uint64_t seed, uint32_t channels,
                                    uint32_t height, uint32_t width, float lo,
                                    float hi, sara_tensor** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    sara::synth::RandomCaseSpec spec;
    spec.feature_shape = {channels, height, width};
    spec.with_prob = false;
    spec.feature_lo = lo;
    spec.feature_hi = hi;
    spec.grid = {1, 1, 1};
    *out = Wrap(SARA_TENSOR_FEATURE_MAP,
                sara::synth::GenRandomCase(seed, spec).feature);
  });
}

sara_status sara_random_prob_map(uint64_t seed, uint32_t height, uint32_t width,
                                 sara_tensor** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    Require(height > 0 && width > 0, "prob dims must be positive");
    sara::synth::Rng rng(seed);
    std::vector<float> p(std::size_t{height} * width);
    for (auto& v : p) v = static_cast<float>(rng.Uniform());
    *out = Wrap(SARA_TENSOR_PROB_MAP,
                sara::ProbMap::Validate({height, width}, std::move(p)));
  });
}

sara_status sara_random_rois(uint64_t seed, uint32_t height, uint32_t width,
                             size_t n, sara_roi* out) {
  return Guard([&] {
    Require(out != nullptr || n == 0, "out is null");
    const auto rois = sara::synth::GenRandomRois(seed, {height, width}, n);
    for (size_t i = 0; i < n; ++i) out[i] = FromRoi(rois[i]);
  });
}

void sara_huddle_default_params(sara_huddle_params* out) {
  const sara::synth::HuddleParams p;
  *out = {p.map_height,    p.map_width, p.instance_width,
          p.instance_height, p.gap,     p.signature_dim,
          p.roi_scale,     p.sigma,     p.seed,
          p.mask_crop.height, p.mask_crop.width};
}

sara_status sara_huddle_generate(const sara_huddle_params* params,
                                 sara_huddle** out) {
  return Guard([&] {
    Require(params != nullptr && out != nullptr, "null argument");
    sara::synth::HuddleParams p;
    p.map_height = params->map_height;
    p.map_width = params->map_width;
    p.instance_width = params->instance_width;
    p.instance_height = params->instance_height;
    p.gap = params->gap;
    p.signature_dim = params->signature_dim;
    p.roi_scale = params->roi_scale;
    p.sigma = params->sigma;
    p.seed = params->seed;
    p.mask_crop = {params->crop_height, params->crop_width};
    *out = new sara_huddle{sara::synth::GenHuddle(p)};
  });
}

sara_status sara_huddle_get_box(const sara_huddle* h, sara_huddle_box which,
                                sara_roi* out) {
  return Guard([&] {
    Require(h != nullptr && out != nullptr, "null argument");
    const auto& s = h->scenario;
    switch (which) {
      case SARA_HUDDLE_GT_A: *out = FromRoi(s.gt_a); return;
      case SARA_HUDDLE_GT_B: *out = FromRoi(s.gt_b); return;
      case SARA_HUDDLE_ROI_1: *out = FromRoi(s.roi_1); return;
      case SARA_HUDDLE_ROI_2: *out = FromRoi(s.roi_2); return;
    }
    Require(false, "unknown huddle box");
  });
}

sara_status sara_huddle_separability(const sara_huddle* h, sara_bin_grid grid,
                                     double* cos_plain, double* cos_shaped) {
  return Guard([&] {
    Require(h != nullptr && cos_plain != nullptr && cos_shaped != nullptr,
            "null argument");
    const auto sep = sara::synth::FeatureSeparability(h->scenario, ToGrid(grid));
    *cos_plain = sep.cos_plain;
    *cos_shaped = sep.cos_shaped;
  });
}

sara_status sara_huddle_export(const sara_huddle* h, const char* directory) {
  return Guard([&] {
    Require(h != nullptr && directory != nullptr, "null argument");
    sara::synth::ExportHuddle(h->scenario, directory);
  });
}

void sara_huddle_destroy(sara_huddle* h) { delete h; }

// ---- refine ----------------------------------------------------------------

double sara_default_fusion_alpha(void) {
  return sara::refine::kDefaultFusionAlpha;
}

double sara_default_nms_threshold(void) {
  return sara::refine::kDefaultNmsThreshold;
}

sara_status sara_fuse_scores(const double* sb, const double* sr, size_t n,
                             size_t background_index, double alpha,
                             double* out) {
  return Guard([&] {
    Require(sb != nullptr && sr != nullptr && out != nullptr, "null argument");
    using sara::refine::ClassScores;
    const auto fused = sara::refine::FuseScores(
        ClassScores({sb, sb + n}, background_index),
        ClassScores({sr, sr + n}, background_index),
        sara::refine::FusionWeight(alpha));
    std::copy(fused.scores().begin(), fused.scores().end(), out);
  });
}

sara_status sara_assign_pseudo_label(const double* scores, size_t n,
                                     size_t background_index, size_t* label) {
  return Guard([&] {
    Require(scores != nullptr && label != nullptr, "null argument");
    *label = sara::refine::AssignPseudoLabel(
        sara::refine::ClassScores({scores, scores + n}, background_index));
  });
}

sara_status sara_iou(sara_roi a, sara_roi b, double* out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    sara::ValidateRoi(ToRoi(a));
    sara::ValidateRoi(ToRoi(b));
    *out = sara::refine::Iou(ToRoi(a), ToRoi(b));
  });
}

sara_status sara_nms(const sara_roi* boxes, const double* scores, size_t n,
                     double threshold, size_t* kept, size_t* n_kept) {
  return Guard([&] {
    Require((boxes != nullptr && scores != nullptr && kept != nullptr) || n == 0,
            "null argument");
    Require(n_kept != nullptr, "n_kept is null");
    std::vector<sara::RoiBox> b(n);
    for (size_t i = 0; i < n; ++i) {
      b[i] = ToRoi(boxes[i]);
      sara::ValidateRoi(b[i]);
    }
    const auto k = sara::refine::Nms(b, {scores, n}, threshold);
    std::copy(k.begin(), k.end(), kept);
    *n_kept = k.size();
  });
}

sara_status sara_fuse_mask_features(const sara_tensor* pooled,
                                    const sara_tensor* f_minus,
                                    sara_tensor** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    *out = Wrap(SARA_TENSOR_POOLED,
                sara::refine::FuseMaskFeatures(AsPooled(pooled), AsPooled(f_minus)));
  });
}

sara_status sara_select_class_mask(const sara_tensor* const* maps,
                                   size_t n_maps, size_t background_index,
                                   size_t label, sara_tensor** out) {
  return Guard([&] {
    Require(maps != nullptr && out != nullptr, "null argument");
    std::vector<sara::ProbMap> stack;
    for (size_t i = 0; i < n_maps; ++i) stack.push_back(AsProb(maps[i]));
    const sara::refine::MaskStack ms(std::move(stack), background_index);
    *out = Wrap(SARA_TENSOR_PROB_MAP, sara::refine::SelectClassMask(ms, label));
  });
}

}  // extern "C"
