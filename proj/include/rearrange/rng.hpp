#pragma once

#include <cstdint>
#include <random>

namespace rearrange {

/// Seeded 64-bit Mersenne Twister. The engine's output sequence is fixed by
/// the C++ standard, and the conversion to doubles below uses only integer
/// arithmetic, so a given seed yields the same draws on every platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t draws() const { return draws_; }

    std::uint64_t next() {
        ++draws_;
        return engine_();
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// True with probability p.
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t seed_;
    std::uint64_t draws_ = 0;
    std::mt19937_64 engine_;
};

}  // namespace rearrange
