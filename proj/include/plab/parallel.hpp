#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace plab {

/// Runs fn(task) for task in [0, n_tasks) on up to `workers` threads.
///
/// Tasks are claimed dynamically; callers write results into per-task slots
/// and merge them in task order, so output never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t n_tasks, unsigned workers, Fn&& fn)
{
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n_tasks, 1))));
    if (workers == 1)
    {
        for (std::size_t t = 0; t < n_tasks; ++t)
            fn(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;)
        {
            const std::size_t t = next.fetch_add(1);
            if (t >= n_tasks)
                return;
            try
            {
                fn(t);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next = n_tasks;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w)
        pool.emplace_back(body);
    body();
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

/// Default worker count: hardware concurrency, at least 1.
inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace plab
