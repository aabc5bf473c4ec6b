#pragma once

#include <cstddef>
#include <functional>

namespace fermat {

/// Effective worker count: `requested` if > 0, else the FERMAT_WORKERS
/// environment variable, else hardware concurrency (at least 1).
int resolve_workers(int requested = 0);

/// Run fn(0..count-1) across `workers` threads (resolved as above).
/// Tasks are claimed from an atomic counter; callers must make each
/// task's output independent of scheduling (write to slot i only).
/// The first exception thrown by any task is rethrown after the join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace fermat
