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
#include <atomic>
#include <new>
#include <thread>

#include "sara/kernels.hpp"

namespace sara::kernels {

namespace {

BatchResult RunJob(const BatchJob& job, BatchMode mode) {
  BatchResult r;
  try {
    if (job.feature == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "job has no feature map");
    }
    ValidateRoi(job.roi);
    ValidateGrid(job.grid);
    const auto& f = *job.feature;
    r.output = job.prob ? SaRoiAlignForward(f, job.roi, *job.prob, job.grid)
                        : RoiAlignForward(f, job.roi, job.grid);
    if (mode == BatchMode::kForwardBackward) {
      PooledGrid ones;
      const PooledGrid* grad_out = job.grad_out;
      if (grad_out == nullptr) {
        ones = PooledGrid(r.output.shape(),
                          std::vector<float>(r.output.shape().size(), 1.0f));
        grad_out = &ones;
      }
      r.grads = job.prob ? SaRoiAlignBackward(*grad_out, f, job.roi, *job.prob,
                                              job.grid)
                         : RoiAlignBackward(*grad_out, job.roi, job.grid,
                                            f.shape());
    }
  } catch (const Error& e) {
    r = BatchResult{e.code(), e.what(), {}, std::nullopt};
  } catch (const std::bad_alloc&) {
    r = BatchResult{ErrorCode::kInvalidArgument, "out of memory", {},
                    std::nullopt};
  }
  return r;
}

}  // namespace

std::vector<BatchResult> BatchRun(const std::vector<BatchJob>& jobs,
                                  BatchMode mode, unsigned workers) {
  std::vector<BatchResult> results(jobs.size());
  const std::size_t nworkers =
      std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(jobs.size(), 1));
  if (nworkers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = RunJob(jobs[i], mode);
    return results;
  }
  // Each job is computed start to finish by one worker into its own slot,
  // so results do not depend on scheduling.
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(nworkers);
    for (std::size_t w = 0; w < nworkers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < jobs.size();
             i = next.fetch_add(1)) {
          results[i] = RunJob(jobs[i], mode);
        }
      });
    }
  }
  return results;
}

}  // namespace sara::kernels
