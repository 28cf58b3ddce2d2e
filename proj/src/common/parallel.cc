// Copyright 2026 The PVSE Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "pvse/common/parallel.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace pvse {

int NumThreads() {
  int requested = 0;
  if (const char *env = std::getenv("PVSE_THREADS")) {
    try {
      requested = std::stoi(env);
    } catch (...) {
      requested = 0;
    }
  }
  if (requested <= 0) {
    requested = static_cast<int>(std::thread::hardware_concurrency());
  }
  return std::max(1, requested);
}

namespace {
// Nested loops run inline on the calling worker.
thread_local bool in_parallel_region = false;
}  // namespace

void ParallelFor(size_t n, const std::function<void(size_t)> &fn) {
  const size_t workers = std::min<size_t>(n, static_cast<size_t>(NumThreads()));
  if (workers <= 1 || in_parallel_region) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&]() {
    in_parallel_region = true;
    for (size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
    in_parallel_region = false;
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto &t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace pvse
