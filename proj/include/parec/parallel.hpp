#pragma once

#include <functional>

namespace parec {

/// Resolve a worker count: `requested` if positive, else the CR_THREADS
/// environment variable, else the hardware concurrency. CR_THREADS always
/// caps the result.
int worker_count(int requested = 0);

/// Run fn(begin, end) over a partition of [begin, end) on `jobs` threads.
/// Chunks are contiguous and deterministic; callers write disjoint outputs,
/// so results are bitwise independent of the thread count.
void parallel_for(int begin, int end, int jobs,
                  const std::function<void(int, int)>& fn);

}  // namespace parec
