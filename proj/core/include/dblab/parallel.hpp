#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace dblab {

// Runs fn(i) for i in [0, count) on up to `workers` threads. Results are stored
// by index, so the output does not depend on scheduling. The first exception
// (by index) is rethrown after all items finish.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, int workers, F&& fn) {
    std::vector<R> out(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t w = std::min<std::size_t>(std::max(1, workers), std::max<std::size_t>(count, 1));
    if (w <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < w; ++k) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace dblab
