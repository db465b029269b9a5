#pragma once

#include <cstddef>
#include <functional>

namespace loel {

// Worker count: LOEL_WORKERS if set and positive, else hardware concurrency.
std::size_t worker_count();

// Runs body(i) for i in [0, n). Each index is handled exactly once; callers must
// write results into per-index slots so output is independent of scheduling.
// Nested calls from inside a worker run serially on that worker.
// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t max_workers = 0);

}  // namespace loel
