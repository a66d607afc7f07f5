#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace bimanip {

// Worker count: BIMANIP_THREADS when set and positive, else the hardware
// concurrency (at least 1).
inline int default_thread_count() {
    if (const char* env = std::getenv("BIMANIP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, n) over contiguous index blocks. The partition is a
// pure function of (n, threads), so writes to disjoint per-index slots give
// thread-count-independent results.
inline void parallel_for(int n, const std::function<void(int)>& fn, int threads = 0) {
    if (threads <= 0) threads = default_thread_count();
    if (threads == 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    if (threads > n) threads = n;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        const int lo = static_cast<int>(static_cast<long long>(n) * t / threads);
        const int hi = static_cast<int>(static_cast<long long>(n) * (t + 1) / threads);
        pool.emplace_back([=, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

}  // namespace bimanip
