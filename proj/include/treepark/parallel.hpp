#pragma once

// Trial-level parallelism. Each trial owns a derived generator, and the only
// thing merged across threads is an integer success count, so the total is
// the same whatever the partition.

#include <cstdint>
#include <cmath>
#include <thread>
#include <vector>

namespace treepark {

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Counts trials where fn(worker_index, trial_index) returns true. Worker w
// handles trials w, w + threads, w + 2*threads, ... and worker indices are
// dense in [0, threads), so callers can preallocate per-worker scratch.
template <class Fn>
std::uint64_t parallel_trial_count(std::uint64_t trials, unsigned threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || trials < 2 * threads) {
        std::uint64_t hits = 0;
        for (std::uint64_t t = 0; t < trials; ++t)
            if (fn(0u, t)) ++hits;
        return hits;
    }
    std::vector<std::uint64_t> partial(threads, 0);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            std::uint64_t hits = 0;
            for (std::uint64_t t = w; t < trials; t += threads)
                if (fn(w, t)) ++hits;
            partial[w] = hits;
        });
    }
    for (auto& th : pool) th.join();
    std::uint64_t hits = 0;
    for (auto p : partial) hits += p;
    return hits;
}

}  // namespace treepark
