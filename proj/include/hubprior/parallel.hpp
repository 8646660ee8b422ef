#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hubprior {

/// Worker count used when a caller passes 0.
inline std::size_t default_threads() {
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/**
 * Runs `task(worker, begin, end)` over [0, total) split into `chunk`-sized
 * pieces handed out dynamically to `threads` workers. Output must be written
 * by index; scheduling order is unspecified. The first exception thrown by a
 * task is rethrown on the calling thread after all workers stop.
 */
template <typename Task>
void parallel_chunks(std::size_t total, std::size_t chunk, std::size_t threads, Task&& task) {
    if (total == 0) {
        return;
    }
    chunk = std::max<std::size_t>(chunk, 1);
    const std::size_t chunks = (total + chunk - 1) / chunk;
    if (threads == 0) {
        threads = default_threads();
    }
    threads = std::min(threads, chunks);

    if (threads == 1) {
        for (std::size_t begin = 0; begin < total; begin += chunk) {
            task(std::size_t{0}, begin, std::min(total, begin + chunk));
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&](std::size_t id) {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
            if (c >= chunks) {
                break;
            }
            try {
                const std::size_t begin = c * chunk;
                task(id, begin, std::min(total, begin + chunk));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed = true;
            }
        }
    };

    {
        std::vector<std::jthread> pool;
        pool.reserve(threads - 1);
        for (std::size_t id = 1; id < threads; ++id) {
            pool.emplace_back(worker, id);
        }
        worker(0);
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace hubprior
