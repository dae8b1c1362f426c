#ifndef CANTORDIM_PARALLEL_HPP
#define CANTORDIM_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace cantordim {

/// Worker count: the request (0 = hardware concurrency), capped by CANTORDIM_THREADS.
inline std::size_t resolve_threads(std::size_t requested) {
    std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CANTORDIM_THREADS")) {
        try {
            const long cap = std::stol(env);
            if (cap > 0) {
                n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
            }
        } catch (const std::exception&) {
            // ignore malformed values
        }
    }
    return std::max<std::size_t>(n, 1);
}

/// Runs body(chunk) for chunk in [0, chunks) on up to `threads` workers.
/// Chunks are claimed dynamically; callers reduce per-chunk results in chunk order.
inline void parallel_chunks(std::size_t chunks, std::size_t threads,
                            const std::function<void(std::size_t)>& body) {
    threads = std::min(threads, chunks);
    if (threads <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            body(c);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) {
                return;
            }
            try {
                body(c);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = chunks;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace cantordim

#endif  // CANTORDIM_PARALLEL_HPP
