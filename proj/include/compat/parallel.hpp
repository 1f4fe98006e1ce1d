#pragma once

#include <cstddef>
#include <functional>

namespace compat {

// Worker count from COMPAT_THREADS (0 or unset = hardware concurrency).
unsigned thread_count();

// Calls fn(i) for every i in [0, n), fanned out over thread_count() workers.
// Each index is visited exactly once; the first exception is rethrown after
// all workers finish. Callers write results into per-index slots so that the
// outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace compat
