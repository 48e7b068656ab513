#pragma once

#include <cstddef>
#include <functional>

namespace eikinetic {

/// Worker count: hardware concurrency, capped by EIKINETIC_THREADS when set.
unsigned worker_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks are
/// disjoint, so writes to per-index output slots need no locking.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace eikinetic
