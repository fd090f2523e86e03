#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace chabauty {

/// Worker count used when a call does not name one.
inline unsigned &default_threads() {
    static unsigned n = 1;
    return n;
}

/// out[i] = f(i) for i in [0, count).  Results do not depend on scheduling;
/// if several calls throw, the exception of the smallest index is rethrown.
template <class F>
auto parallel_map(std::size_t count, F f, unsigned threads = default_threads()) {
    using R = decltype(f(std::size_t{0}));
    std::vector<R> out(count);
    std::vector<std::exception_ptr> errors(count);
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                out[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (auto &th : pool)
        th.join();
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

} // namespace chabauty
