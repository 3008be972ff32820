#ifndef INEQLAB_RNG_HPP
#define INEQLAB_RNG_HPP

// Small deterministic RNG (splitmix64). The standard <random> distributions
// are implementation-defined, which would break the byte-identical-output
// guarantee, so uniforms are mapped from raw 64-bit draws explicitly.

#include <cstdint>

namespace ineqlab {

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }
};

// Decorrelate derived streams (seed, index) -> sub-seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 s(seed ^ (0x9e3779b97f4a7c15ull * (index + 1)));
    return s.next_u64();
}

} // namespace ineqlab

#endif
