#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace sirlat::detail {

/// Calls f(i) for i in [begin, end) on up to `threads` workers with contiguous
/// chunks. The first exception thrown by any worker is rethrown.
template <class F>
void parallel_for(int begin, int end, int threads, F&& f)
{
    const int n = end - begin;
    if (n <= 0) {
        return;
    }
    threads = std::clamp(threads, 1, n);
    if (threads == 1) {
        for (int i = begin; i < end; ++i) {
            f(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    pool.reserve(threads);
    for (int k = 0; k < threads; ++k) {
        const int lo = begin + static_cast<int>(static_cast<long long>(n) * k / threads);
        const int hi = begin + static_cast<int>(static_cast<long long>(n) * (k + 1) / threads);
        pool.emplace_back([&, lo, hi, k] {
            try {
                for (int i = lo; i < hi; ++i) {
                    f(i);
                }
            } catch (...) {
                errors[k] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace sirlat::detail
