#pragma once

#include <atomic>
#include <cstdint>

namespace fedmf {

/// Contention-safe floating-point operation counter.
///
/// Kernels never take a counter argument. Instead a FlopScope installs a
/// counter for the current thread and every kernel executed on that thread
/// reports into it. Scopes nest; the innermost one wins. Work executed with
/// no active scope is not counted.
class FlopCounter {
public:
    FlopCounter() = default;
    FlopCounter(const FlopCounter&) = delete;
    FlopCounter& operator=(const FlopCounter&) = delete;

    void add(std::uint64_t n) noexcept { count_.fetch_add(n, std::memory_order_relaxed); }
    std::uint64_t value() const noexcept { return count_.load(std::memory_order_relaxed); }
    void reset() noexcept { count_.store(0, std::memory_order_relaxed); }

private:
    std::atomic<std::uint64_t> count_{0};
};

/// RAII guard routing this thread's flop reports to `counter`.
/// Passing nullptr suspends accounting (used for instrumentation).
class FlopScope {
public:
    explicit FlopScope(FlopCounter* counter) noexcept;
    ~FlopScope();
    FlopScope(const FlopScope&) = delete;
    FlopScope& operator=(const FlopScope&) = delete;

private:
    FlopCounter* previous_;
};

/// Report `n` flops to the counter active on this thread, if any.
void record_flops(std::uint64_t n) noexcept;

}  // namespace fedmf
