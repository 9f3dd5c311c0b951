#pragma once

#include <cstddef>
#include <functional>

namespace bzconv {

/// Runs body(i) for i in [0, n) on up to `threads` workers (static
/// interleaved schedule). Results must be written to per-index slots; the
/// first exception in index order is rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

/// threads <= 0 means "all hardware threads".
int resolve_thread_count(int threads);

}  // namespace bzconv
