#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace fanocqed::detail {

// Run fn(i) for i in [0, n) on up to `threads` threads. Results must be
// written to disjoint slots; the partition is deterministic.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const unsigned workers =
        std::min<unsigned>(threads, std::thread::hardware_concurrency() > 0
                                        ? std::thread::hardware_concurrency()
                                        : 2);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&fn, w, workers, n] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace fanocqed::detail
