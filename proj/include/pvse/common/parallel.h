// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef PVSE_COMMON_PARALLEL_H_
#define PVSE_COMMON_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace pvse {

// Worker count from PVSE_THREADS (0 or unset = hardware concurrency).
int NumThreads();

// Runs fn(i) for i in [0, n). Each index runs exactly once; callers write
// results into index-addressed slots so output order never depends on
// scheduling. The first exception thrown by any task is rethrown.
void ParallelFor(size_t n, const std::function<void(size_t)> &fn);

}  // namespace pvse

#endif  // PVSE_COMMON_PARALLEL_H_
