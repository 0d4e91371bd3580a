#pragma once

#include <cstddef>
#include <functional>

namespace cortex {

/// Worker count for internal loops: CORTEX_ATLAS_THREADS if set (>= 1),
/// otherwise the hardware concurrency.
unsigned thread_budget();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks write to
/// disjoint outputs, so results never depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 1024);

}  // namespace cortex
