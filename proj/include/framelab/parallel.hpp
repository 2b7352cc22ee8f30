#pragma once

#include <cstddef>
#include <functional>

namespace framelab {

// Worker count: FRAMELAB_THREADS if set and positive, otherwise
// hardware_concurrency (at least 1).
std::size_t thread_budget();

// Runs body(i) for i in [0, n). Work is split into contiguous static blocks,
// so results written by index are identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace framelab
