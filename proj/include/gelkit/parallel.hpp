#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace gelkit {

/// Worker count: GELKIT_THREADS if set, else hardware concurrency.
inline int worker_count(int requested = 0)
{
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("GELKIT_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap > 0)
                n = std::min(n > 0 ? n : cap, cap);
        } catch (const std::exception&) {
        }
    }
    return std::max(1, n);
}

/// Evaluates fn(i) for i in [0, count) on a pool; results are stored by index so
/// the output order never depends on completion order. The first exception is
/// rethrown after all workers finish.
template <typename Fn>
auto parallel_map(std::size_t count, int threads, Fn fn) -> std::vector<decltype(fn(std::size_t{}))>
{
    using Result = decltype(fn(std::size_t{}));
    std::vector<Result> out(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        }
    };

    const auto n = static_cast<std::size_t>(std::max(1, threads));
    if (n == 1 || count <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t k = 0; k < std::min(n, count); ++k)
            pool.emplace_back(work);
    }
    if (error)
        std::rethrow_exception(error);
    return out;
}

} // namespace gelkit
