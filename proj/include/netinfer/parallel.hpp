#pragma once

#include <cstddef>
#include <functional>

namespace netinfer {

/// Worker cap from NETINFER_THREADS (unset or 0 means hardware concurrency).
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Each index is
/// processed exactly once; the first exception thrown by any task is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace netinfer
