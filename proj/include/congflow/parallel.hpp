#pragma once

#include <cstddef>
#include <functional>

namespace congflow {

// Runs fn(i) for i in [0, n); indices are partitioned over a small worker
// pool.  The worker count is capped by the CONGRUENCE_FLOWS_THREADS
// environment variable.  Results must be written to per-index storage, which
// keeps the output independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace congflow
