#pragma once

#include <cstdint>
#include <random>

namespace divent {

// SplitMix64 finalizer, used to derive well-separated 64-bit seeds from
// structured keys such as (master_seed, n, replicate).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n, std::uint64_t replicate) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ n);
    h = mix64(h ^ replicate);
    return h;
}

// Deterministic uniform-draw source. Wraps mt19937_64 so every consumer uses
// the same engine and the same 53-bit mapping to [0, 1).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1), 53 random bits. Never returns 1.0.
    double next_u01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace divent
