#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace qrad {

/// Worker count: explicit request, else CASIMIR_RESPONSE_THREADS, else hardware.
inline int resolve_threads(int requested = 0)
{
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CASIMIR_RESPONSE_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Static block partition of [0, n); each index is visited exactly once and
/// results must be written to preassigned slots, so the outcome does not
/// depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body)
{
    threads = resolve_threads(threads);
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace qrad
