#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ftasep
{
    /// Run fn(i) for i in [0, n) on up to `workers` threads. Results are stored by trial
    /// index, so the output does not depend on scheduling. The exception of the lowest
    /// failing index is rethrown.
    template <class Fn>
    auto run_trials(std::size_t n, std::size_t workers, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))>
    {
        using R = decltype(fn(std::size_t{}));
        std::vector<R> results(n);
        std::vector<std::exception_ptr> errors(n);
        std::atomic<std::size_t> next{0};
        auto work = [&]() {
            for (std::size_t i = next++; i < n; i = next++)
            {
                try
                {
                    results[i] = fn(i);
                }
                catch (...)
                {
                    errors[i] = std::current_exception();
                }
            }
        };
        const std::size_t count = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
        if (count == 1)
        {
            work();
        }
        else
        {
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < count; ++w)
                pool.emplace_back(work);
        }
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
        return results;
    }
}  // namespace ftasep
