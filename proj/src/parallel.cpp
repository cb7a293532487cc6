#include "rfcd/parallel.hpp"

#include <cstdlib>

namespace rfcd {

unsigned worker_count() {
    if (const char* env = std::getenv("RFCD_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    unsigned workers = worker_count();
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            // Contiguous static partition: worker w owns [lo, hi).
            std::size_t chunk = (n + workers - 1) / workers;
            std::size_t lo = static_cast<std::size_t>(w) * chunk;
            std::size_t hi = std::min(n, lo + chunk);
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace rfcd
