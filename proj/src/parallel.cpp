#include "wofe3d/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace wofe3d {

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const unsigned t = std::min<std::size_t>(resolve_threads(threads), n);
    if (t <= 1 || n < 2048) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(t);
    const std::size_t chunk = (n + t - 1) / t;
    for (unsigned w = 0; w < t; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& worker : workers) worker.join();
}

}  // namespace wofe3d
