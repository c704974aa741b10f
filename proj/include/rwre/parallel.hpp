#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rwre {

// Runs fn(i) for i in [0, n) over a fixed block partition. Each task owns its
// index, so callers that write only to slot i of a preallocated buffer get
// results independent of the thread count; reductions happen afterwards in
// index order. Exceptions are captured and rethrown on the calling thread.
template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
    if (n == 0) return;
    if (threads < 1) threads = 1;
    const std::size_t t = std::min<std::size_t>(threads, n);
    if (t == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (std::size_t w = 0; w < t; ++w) {
        const std::size_t lo = n * w / t;
        const std::size_t hi = n * (w + 1) / t;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace rwre
