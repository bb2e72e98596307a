#include "fedmf/flops.hpp"

namespace fedmf {

namespace {
thread_local FlopCounter* active_counter = nullptr;
}

FlopScope::FlopScope(FlopCounter* counter) noexcept : previous_(active_counter) {
    active_counter = counter;
}

FlopScope::~FlopScope() { active_counter = previous_; }

void record_flops(std::uint64_t n) noexcept {
    if (active_counter != nullptr) active_counter->add(n);
}

}  // namespace fedmf
