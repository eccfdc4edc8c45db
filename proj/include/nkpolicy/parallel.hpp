#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nkpolicy {

/// Worker count from NKPOLICY_WORKERS, else the hardware concurrency (at least 1).
int default_worker_count();

/// Evaluates fn(0..count-1) on up to `workers` threads and returns the results
/// in index order, so the output does not depend on scheduling. Units are
/// claimed from a shared counter. The first exception thrown by any unit is
/// rethrown after all threads stop.
template <class Fn>
auto parallel_map(std::size_t count, int workers, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
    using Result = decltype(fn(std::size_t{}));
    std::vector<Result> results(count);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count || failed.load(std::memory_order_relaxed)) return;
            try {
                results[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };

    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads == 1 || count < 2) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(std::min(threads, count));
        for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
    return results;
}

}  // namespace nkpolicy
