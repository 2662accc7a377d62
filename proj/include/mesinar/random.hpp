#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace mesinar {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/**
 * @brief Owned pseudo-random stream.
 *
 * Wraps a 64-bit Mersenne Twister and produces uniforms with a fixed
 * bit-to-double mapping, so draw sequences are identical across standard
 * library implementations. One stream per thread of execution.
 */
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed = 0) : engine_(mix64(seed)) {}

    /// Stream keyed by (seed, a, b); distinct keys give unrelated streams.
    static RandomStream derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

    static constexpr result_type min() { return std::numeric_limits<result_type>::min(); }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1); never returns 0.
    double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (one draw per call, the pair is not cached).
    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace mesinar
