#pragma once

#include <cstddef>
#include <functional>

namespace dimred {

/// Thread bound for sweeps: explicit setting, else DIMRED_NLS_THREADS, else
/// the number of logical cores.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, n) on up to thread_count() workers. Each index
/// is executed exactly once; results must be written to per-index slots so
/// that the outcome does not depend on scheduling. The first exception thrown
/// by any body is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace dimred
