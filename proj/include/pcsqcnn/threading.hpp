#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace pcsqcnn {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(begin, end) over fixed-size chunks of [0, n). Chunking is
/// independent of the thread count, so callers that write per-index (or
/// per-chunk) slots and reduce them in chunk order get bitwise-identical
/// results at any --threads value.
template <typename Fn>
inline void parallel_chunks(std::int64_t n, std::int64_t chunk, int threads, Fn&& fn) {
    if (n <= 0) return;
    if (chunk < 1) chunk = 1;
    const std::int64_t n_chunks = (n + chunk - 1) / chunk;
    threads = resolve_threads(threads);
    if (threads <= 1 || n_chunks == 1) {
        for (std::int64_t c = 0; c < n_chunks; ++c) {
            fn(c, c * chunk, std::min(n, (c + 1) * chunk));
        }
        return;
    }
    std::atomic<std::int64_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            fn(c, c * chunk, std::min(n, (c + 1) * chunk));
        }
    };
    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(std::min<std::int64_t>(threads, n_chunks));
    pool.reserve(static_cast<std::size_t>(spawn));
    for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
}

}  // namespace pcsqcnn
