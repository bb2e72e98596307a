#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace fedmf::detail {

/// Run fn(0..count-1), optionally one thread per index. The first exception
/// (by index) is rethrown after all work has joined.
template <class Fn>
void for_each_index(std::size_t count, bool parallel, Fn&& fn) {
    if (!parallel || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    {
        std::vector<std::jthread> workers;
        workers.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            workers.emplace_back([&, i] {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace fedmf::detail
