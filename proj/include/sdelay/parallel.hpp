// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sdelay {

/// Runs fn(i) for i in [0, n) across up to n_threads workers. Each index owns
/// its own output slot, so results are identical for every thread count; the
/// first exception is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t n_threads, Fn&& fn) {
    if (n == 0) return;
    if (n_threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    n_threads = std::min(n_threads, n);
    std::vector<std::thread> workers;
    std::mutex err_mtx;
    std::exception_ptr err;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < n_threads; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lock(err_mtx);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace sdelay
