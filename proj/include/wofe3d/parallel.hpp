#pragma once

#include <cstddef>
#include <functional>

namespace wofe3d {

// 0 -> hardware concurrency (at least 1).
unsigned resolve_threads(unsigned requested);

// Runs fn over contiguous index ranges [begin, end) that cover [0, n).
// Results must be written to disjoint per-index slots so the chunking is
// observationally deterministic.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace wofe3d
