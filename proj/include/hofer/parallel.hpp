#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace hofer {

void set_worker_count(unsigned n);
unsigned worker_count();

// Runs body(i) for i in [0, n) over contiguous static chunks.  Callers write results
// into pre-sized slots, so the outcome does not depend on the worker count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    unsigned w = worker_count();
    if (w <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::size_t chunks = std::min<std::size_t>(w, n);
    std::vector<std::exception_ptr> errors(chunks);
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        std::size_t lo = n * c / chunks, hi = n * (c + 1) / chunks;
        pool.emplace_back([&, lo, hi, c] {
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace hofer
