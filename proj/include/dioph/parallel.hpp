#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace dioph {

// Runs fn over [0,n) split into fixed-size blocks; per-block results are
// collected and folded by the caller in block order, so reductions are
// deterministic regardless of thread count.
template <class R, class Fn>
std::vector<R> parallel_block_map(std::size_t n, std::size_t block_size, Fn&& fn) {
    const std::size_t n_blocks = block_size ? (n + block_size - 1) / block_size : 0;
    std::vector<R> results(n_blocks);
    if (n_blocks == 0) return results;

    unsigned hw = std::thread::hardware_concurrency();
    std::size_t n_threads = std::min<std::size_t>(hw ? hw : 1, n_blocks);
    if (n_threads <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) {
            std::size_t lo = b * block_size;
            std::size_t hi = std::min(n, lo + block_size);
            results[b] = fn(lo, hi);
        }
        return results;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t b = next.fetch_add(1);
            if (b >= n_blocks) break;
            std::size_t lo = b * block_size;
            std::size_t hi = std::min(n, lo + block_size);
            results[b] = fn(lo, hi);
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

} // namespace dioph
