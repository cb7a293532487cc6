#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace rfcd {

/// Static-partition parallel loop over [0, n). Each index is processed by a
/// fixed worker regardless of scheduling, so writers to disjoint outputs are
/// bit-deterministic. Set RFCD_THREADS=1 to force serial execution.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Worker count used by parallel_for.
unsigned worker_count();

}  // namespace rfcd
