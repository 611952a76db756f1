#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace scb {

namespace detail {

inline unsigned& thread_cap() {
    static unsigned cap = 0;  // 0 = not configured yet
    return cap;
}

inline bool& inside_parallel_region() {
    thread_local bool inside = false;
    return inside;
}

}  // namespace detail

/// Caps the number of worker threads (0 restores the default: SCB_THREADS
/// environment variable if set, otherwise hardware concurrency).
inline void set_max_threads(unsigned n) { detail::thread_cap() = n; }

inline unsigned max_threads() {
    unsigned cap = detail::thread_cap();
    if (cap > 0) return cap;
    if (const char* env = std::getenv("SCB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Runs fn(i) for i in [0, n) across worker threads. Callers must write
/// results into per-index slots; then output is independent of scheduling.
/// Nested calls run serially, so replicate-level parallelism wins.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    if (n == 0) return;
    const unsigned workers = max_threads();
    if (n == 1 || workers <= 1 || detail::inside_parallel_region()) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        detail::inside_parallel_region() = true;
        while (true) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(n, std::memory_order_relaxed);
                break;
            }
        }
        detail::inside_parallel_region() = false;
    };

    const std::size_t thread_count = std::min<std::size_t>(workers, n);
    std::vector<std::thread> threads;
    threads.reserve(thread_count - 1);
    for (std::size_t t = 0; t + 1 < thread_count; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace scb
