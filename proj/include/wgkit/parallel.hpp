#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace wgkit {

// Worker count: `requested` if positive, else hardware concurrency; always
// capped by the WGKIT_THREADS environment variable when set.
int resolve_threads(int requested, std::size_t tasks);

// Evaluates fn(0..n-1) on a small worker pool. Results come back in index
// order and the first failing index (not the first failure in time) is
// rethrown, so the outcome does not depend on scheduling.
template <class Fn>
auto parallel_map(std::size_t n, Fn&& fn, int threads = 0)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
    using R = std::invoke_result_t<Fn&, std::size_t>;
    std::vector<std::optional<R>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const int workers = resolve_threads(threads, n);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    }

    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace wgkit
