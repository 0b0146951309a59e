#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace thgame {

inline unsigned default_workers()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Run body(i) for i in [0, n) on at most `workers` threads (0 = hardware concurrency).
/// Each index is visited exactly once; the first exception is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body, unsigned workers = 0)
{
    if (workers == 0)
        workers = default_workers();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next = n;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(worker);
    }
    if (error)
        std::rethrow_exception(error);
}

} // namespace thgame
