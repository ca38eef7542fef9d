#pragma once

#include <cstddef>
#include <functional>

namespace yamabe {

/// Number of worker threads: hardware concurrency capped by the
/// OBSTRUCTION_LAB_THREADS environment variable (>=1).
int worker_count();

/// Runs fn(i) for i in [0, n) on the worker pool. Callers keep determinism by
/// writing results into preallocated slots and reducing sequentially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace yamabe
