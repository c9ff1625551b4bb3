#pragma once

#include <algorithm>
#include <thread>
#include <utility>
#include <vector>

namespace changedyn {

// Static slot partition. Work item i always sees the same inputs, so results
// are independent of the thread count.
template <typename F>
void parallel_for(int n, int n_threads, F&& fn) {
    if (n_threads <= 1 || n < 2 * n_threads) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    const int chunk = (n + n_threads - 1) / n_threads;
    for (int w = 0; w < n_threads; ++w) {
        const int lo = w * chunk;
        const int hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace changedyn
