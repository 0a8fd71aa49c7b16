// parallel.hpp - index-parallel loops whose results never depend on the thread count.
//
// Each index writes only its own output slot, so any reduction done afterwards
// in index order is bit-identical for 1 or many threads.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace csm {

/// Threads to use: explicit request if positive, else CSM_THREADS if set and
/// positive, else std::thread::hardware_concurrency() (at least 1).
int resolve_threads(std::optional<int> requested = {});

/// Calls f(i) for i in [0, n) on up to `threads` workers (contiguous chunks).
/// The first exception thrown by any f is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

}  // namespace csm
