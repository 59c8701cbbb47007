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

/*
 * C interface to the SARA kernel library.
 *
 * Every function that can fail returns a sara_status; on failure a
 * human-readable description is available from sara_last_error() on the
 * calling thread until the next failing call. Objects are opaque handles
 * created by *_create / *_run / *_generate functions and released with the
 * matching *_destroy function. Tensor handles are immutable.
 *
 * Coordinates: x runs along columns, y along rows; grid cell (row j, col k)
 * is centered at (x = k, y = j).
 */
#ifndef SARA_SARA_H_
#define SARA_SARA_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define SARA_API __declspec(dllexport)
#else
#  define SARA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sara_status {
  SARA_OK = 0,
  SARA_ERR_INVALID_ARGUMENT = 1,
  SARA_ERR_LENGTH_MISMATCH = 2,
  SARA_ERR_NON_FINITE = 3,
  SARA_ERR_RANGE = 4,
  SARA_ERR_SHAPE_MISMATCH = 5,
  SARA_ERR_BAD_MAGIC = 6,
  SARA_ERR_UNSUPPORTED_VERSION = 7,
  SARA_ERR_TRUNCATED = 8,
  SARA_ERR_IO = 9,
  SARA_ERR_INFEASIBLE_GEOMETRY = 10,
  SARA_ERR_UNDEFINED_SIMILARITY = 11,
  SARA_ERR_INTERNAL = 99
} sara_status;

SARA_API const char* sara_version(void);
SARA_API const char* sara_status_name(sara_status status);
SARA_API const char* sara_last_error(void);

typedef struct sara_roi {
  double x1, y1, x2, y2;
} sara_roi;

typedef struct sara_bin_grid {
  uint32_t rows;
  uint32_t cols;
  uint32_t samples_per_side;
} sara_bin_grid;

/* ---- tensors ------------------------------------------------------------ */

typedef enum sara_tensor_kind {
  SARA_TENSOR_RAW = 0, /* unvalidated, e.g. gradients */
  SARA_TENSOR_FEATURE_MAP = 1,
  SARA_TENSOR_PROB_MAP = 2,
  SARA_TENSOR_POOLED = 3
} sara_tensor_kind;

typedef struct sara_tensor sara_tensor;

/* Data is copied. len must equal the product of the dims. */
SARA_API sara_status sara_feature_map_create(uint32_t channels, uint32_t height,
                                             uint32_t width, const float* data,
                                             size_t len, sara_tensor** out);
SARA_API sara_status sara_prob_map_create(uint32_t height, uint32_t width,
                                          const float* data, size_t len,
                                          sara_tensor** out);
SARA_API sara_status sara_pooled_create(uint32_t channels, uint32_t rows,
                                        uint32_t cols, const float* data,
                                        size_t len, sara_tensor** out);
SARA_API void sara_tensor_destroy(sara_tensor* t);

SARA_API sara_tensor_kind sara_tensor_get_kind(const sara_tensor* t);
SARA_API size_t sara_tensor_ndim(const sara_tensor* t);
SARA_API uint32_t sara_tensor_dim(const sara_tensor* t, size_t axis);
SARA_API size_t sara_tensor_size(const sara_tensor* t);
/* Borrowed pointer, valid for the handle's lifetime. */
SARA_API const float* sara_tensor_data(const sara_tensor* t);

/* SARA container I/O. Reading validates the tensor as `kind`
 * (SARA_TENSOR_RAW accepts anything well-formed). */
SARA_API sara_status sara_tensor_read_file(const char* path,
                                           sara_tensor_kind kind,
                                           sara_tensor** out);
SARA_API sara_status sara_tensor_write_file(const sara_tensor* t,
                                            const char* path,
                                            size_t* bytes_written);
/* Writes the encoding into buf when cap is large enough; *needed always
 * receives the encoded size. */
SARA_API sara_status sara_tensor_encode(const sara_tensor* t, uint8_t* buf,
                                        size_t cap, size_t* needed);
SARA_API sara_status sara_tensor_decode(const uint8_t* buf, size_t len,
                                        sara_tensor_kind kind,
                                        sara_tensor** out);

/* ---- kernels ------------------------------------------------------------ */

SARA_API sara_status sara_roi_align_forward(const sara_tensor* feature,
                                            sara_roi roi, sara_bin_grid grid,
                                            sara_tensor** out);
SARA_API sara_status sara_sa_roi_align_forward(const sara_tensor* feature,
                                               sara_roi roi,
                                               const sara_tensor* prob,
                                               sara_bin_grid grid,
                                               sara_tensor** out);
/* Gradients come back as SARA_TENSOR_RAW handles. */
SARA_API sara_status sara_roi_align_backward(const sara_tensor* grad_out,
                                             sara_roi roi, sara_bin_grid grid,
                                             uint32_t channels, uint32_t height,
                                             uint32_t width,
                                             sara_tensor** grad_feature);
SARA_API sara_status sara_sa_roi_align_backward(
    const sara_tensor* grad_out, const sara_tensor* feature, sara_roi roi,
    const sara_tensor* prob, sara_bin_grid grid, sara_tensor** grad_feature,
    sara_tensor** grad_prob);

/* ---- batch driver ------------------------------------------------------- */

typedef enum sara_batch_mode {
  SARA_BATCH_FORWARD = 0,
  SARA_BATCH_FORWARD_BACKWARD = 1
} sara_batch_mode;

typedef struct sara_batch_job {
  const sara_tensor* feature;
  sara_roi roi;
  const sara_tensor* prob;     /* NULL selects plain RoIAlign */
  sara_bin_grid grid;
  const sara_tensor* grad_out; /* NULL means all ones */
} sara_batch_job;

typedef struct sara_batch_result sara_batch_result;

/* Fails only for malformed arguments; per-job failures are reported per
 * slot. Results are identical for every worker count. */
SARA_API sara_status sara_batch_run(const sara_batch_job* jobs, size_t n_jobs,
                                    sara_batch_mode mode, unsigned workers,
                                    sara_batch_result** out);
SARA_API size_t sara_batch_result_count(const sara_batch_result* r);
SARA_API sara_status sara_batch_result_status(const sara_batch_result* r,
                                              size_t i);
SARA_API const char* sara_batch_result_message(const sara_batch_result* r,
                                               size_t i);
/* Borrowed handles; NULL when the slot failed or has no such output. */
SARA_API const sara_tensor* sara_batch_result_output(const sara_batch_result* r,
                                                     size_t i);
SARA_API const sara_tensor* sara_batch_result_grad_feature(
    const sara_batch_result* r, size_t i);
SARA_API const sara_tensor* sara_batch_result_grad_prob(
    const sara_batch_result* r, size_t i);
/* 64-bit FNV-1a over statuses and output/gradient bits, in job order. */
SARA_API uint64_t sara_batch_result_checksum(const sara_batch_result* r);
SARA_API void sara_batch_result_destroy(sara_batch_result* r);

/* ---- oracle ------------------------------------------------------------- */

/* 64-bit reference outputs; out must hold channels*rows*cols doubles. */
SARA_API sara_status sara_oracle_roi_align(const sara_tensor* feature,
                                           sara_roi roi, sara_bin_grid grid,
                                           double* out, size_t cap);
SARA_API sara_status sara_oracle_sa_roi_align(const sara_tensor* feature,
                                              sara_roi roi,
                                              const sara_tensor* prob,
                                              sara_bin_grid grid, double* out,
                                              size_t cap);

typedef enum sara_kernel_kind {
  SARA_KERNEL_ROIALIGN = 0,
  SARA_KERNEL_SA = 1
} sara_kernel_kind;

typedef enum sara_grad_target {
  SARA_TARGET_FEATURE = 0,
  SARA_TARGET_PROB = 1
} sara_grad_target;

typedef struct sara_gradcheck_report {
  sara_grad_target target;
  double max_rel_error;
  size_t worst_index;
  double analytic_value;
  double numeric_value;
  double tolerance;
  int pass;
} sara_gradcheck_report;

/* Gradient check on the seeded random instance used by the CLI
 * (4x8x8 features, 6x6 prob map, grid drawn from the seed). */
SARA_API sara_status sara_gradcheck_random(sara_kernel_kind kind, uint64_t seed,
                                           sara_grad_target target, double eps,
                                           double tolerance,
                                           sara_gradcheck_report* out);

/* ---- synthetic data ----------------------------------------------------- */

SARA_API sara_status sara_random_feature_map(uint64_t seed, uint32_t channels,
                                             uint32_t height, uint32_t width,
                                             float lo, float hi,
                                             sara_tensor** out);
SARA_API sara_status sara_random_prob_map(uint64_t seed, uint32_t height,
                                          uint32_t width, sara_tensor** out);
/* RoIs with positive extent and >= 50% of their area on the map. */
SARA_API sara_status sara_random_rois(uint64_t seed, uint32_t height,
                                      uint32_t width, size_t n, sara_roi* out);

typedef struct sara_huddle_params {
  uint32_t map_height;
  uint32_t map_width;
  uint32_t instance_width;
  uint32_t instance_height;
  uint32_t gap;
  uint32_t signature_dim;
  double roi_scale;
  double sigma;
  uint64_t seed;
  uint32_t crop_height;
  uint32_t crop_width;
} sara_huddle_params;

typedef enum sara_huddle_box {
  SARA_HUDDLE_GT_A = 0,
  SARA_HUDDLE_GT_B = 1,
  SARA_HUDDLE_ROI_1 = 2,
  SARA_HUDDLE_ROI_2 = 3
} sara_huddle_box;

typedef struct sara_huddle sara_huddle;

SARA_API void sara_huddle_default_params(sara_huddle_params* out);
SARA_API sara_status sara_huddle_generate(const sara_huddle_params* params,
                                          sara_huddle** out);
SARA_API sara_status sara_huddle_get_box(const sara_huddle* h,
                                         sara_huddle_box which, sara_roi* out);
SARA_API sara_status sara_huddle_separability(const sara_huddle* h,
                                              sara_bin_grid grid,
                                              double* cos_plain,
                                              double* cos_shaped);
/* Writes feature.sara, mask_a.sara, mask_b.sara and scenario.json. */
SARA_API sara_status sara_huddle_export(const sara_huddle* h,
                                        const char* directory);
SARA_API void sara_huddle_destroy(sara_huddle* h);

/* ---- refining-module arithmetic ----------------------------------------- */

SARA_API double sara_default_fusion_alpha(void);
SARA_API double sara_default_nms_threshold(void);

/* out[i] = (sb[i] + alpha * sr[i]) / (1 + alpha) */
SARA_API sara_status sara_fuse_scores(const double* sb, const double* sr,
                                      size_t n, size_t background_index,
                                      double alpha, double* out);
SARA_API sara_status sara_assign_pseudo_label(const double* scores, size_t n,
                                              size_t background_index,
                                              size_t* label);
SARA_API sara_status sara_iou(sara_roi a, sara_roi b, double* out);
/* kept must hold n entries; *n_kept receives the count. */
SARA_API sara_status sara_nms(const sara_roi* boxes, const double* scores,
                              size_t n, double threshold, size_t* kept,
                              size_t* n_kept);
SARA_API sara_status sara_fuse_mask_features(const sara_tensor* pooled,
                                             const sara_tensor* f_minus,
                                             sara_tensor** out);
/* maps[i] is the mask of the i-th foreground class (class indices other
 * than background_index, ascending). */
SARA_API sara_status sara_select_class_mask(const sara_tensor* const* maps,
                                            size_t n_maps,
                                            size_t background_index,
                                            size_t label, sara_tensor** out);

#ifdef __cplusplus
}
#endif

#endif /* SARA_SARA_H_ */
