/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace gbd {

// Runs fn(i) for every i in [0, n) on up to jobs worker threads. fn must
// not throw; callers stash per-task results (or errors) into
// preallocated slots and apply them afterwards in task order, which keeps
// batch outputs independent of scheduling.
template <class Fn> void parallel_for(size_t n, unsigned jobs, Fn&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    unsigned workers = static_cast<unsigned>(std::min<size_t>(jobs, n));
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (std::thread& t : pool) t.join();
}

} // namespace gbd
