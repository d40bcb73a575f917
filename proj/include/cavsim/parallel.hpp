#pragma once

#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace cavsim::detail {

// Thread count for Monte Carlo ensembles: CAVSIM_THREADS when set, else the
// hardware count. Results never depend on this value; it only changes wall
// time.
inline std::size_t thread_count_from_env() {
    if (const char* s = std::getenv("CAVSIM_THREADS")) {
        const long v = std::atol(s);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

// Runs fn(i) for i in [0, n) over contiguous chunks. fn(i) must touch only
// state owned by item i, so the outcome is identical for any thread count.
template <typename Fn>
inline void parallel_for_deterministic(std::size_t n, std::size_t n_threads, Fn&& fn) {
    if (n == 0) return;
    if (n_threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min(n_threads, n);
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace cavsim::detail
