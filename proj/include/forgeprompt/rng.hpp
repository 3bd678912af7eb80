#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace forgeprompt {

/// Seeded generator with platform-independent draws. std::mt19937_64 output
/// is fixed by the standard; the distributions below are ours because the
/// standard library ones are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t index(std::size_t n) {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return static_cast<std::size_t>(v % bound);
    }

    /// Standard normal via Box-Muller.
    double normal();

private:
    std::mt19937_64 engine_;
};

std::uint64_t fnv1a64(std::string_view text);
std::uint64_t splitmix64(std::uint64_t x);

/// Per-sample seed: independent of processing order and worker count.
std::uint64_t sample_seed(std::uint64_t global_seed, std::string_view stem);

}  // namespace forgeprompt
