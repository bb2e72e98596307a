#pragma once

#include <cstdint>
#include <random>

namespace fedmf {

/// Mix a base seed with a stream index (SplitMix64 finalizer). Used to give
/// every client, draw and mask its own independent, reproducible stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

/// Reproducible standard-normal stream.
///
/// Engine: std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Transform: Box–Muller on 53-bit uniforms, first of each pair
/// returned first. std::normal_distribution is deliberately avoided because
/// its algorithm is implementation-defined.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double next();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer in [0, bound) by rejection; bound >= 1.
    std::uint64_t uniform_index(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fedmf
