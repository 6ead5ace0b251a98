// Copyright 2026 The lattail Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>

namespace lattail {

/// Number of worker threads used by the data-parallel sweeps.
/// Defaults to LATTAIL_THREADS when set, otherwise the OpenMP default.
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n). Each index must write only to its own output slot;
/// results are then independent of the thread count. The first exception thrown by a
/// body is rethrown on the calling thread.
template <class Body>
void parallel_for(std::int64_t n, Body&& body) {
  std::exception_ptr error;
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static) num_threads(thread_count()) if (n > 1)
  for (std::int64_t i = 0; i < n; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      body(i);
    } catch (...) {
#pragma omp critical(lattail_parallel_error)
      {
        if (!error) error = std::current_exception();
      }
      failed.store(true, std::memory_order_relaxed);
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Splits [0, n) into contiguous blocks and runs body(begin, end) on each, so callers can
/// hold per-block scratch state (evaluators, buffers).
template <class Body>
void parallel_blocks(std::int64_t n, Body&& body) {
  if (n <= 0) return;
  const std::int64_t blocks = std::min<std::int64_t>(n, 8 * static_cast<std::int64_t>(thread_count()));
  parallel_for(blocks, [&](std::int64_t b) {
    std::int64_t lo = n * b / blocks, hi = n * (b + 1) / blocks;
    if (lo < hi) body(lo, hi);
  });
}

}  // namespace lattail
