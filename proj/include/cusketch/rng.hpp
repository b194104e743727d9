#pragma once

#include <cstdint>
#include <string_view>

namespace cusketch {

// splitmix64 finalizer (Stafford variant 13). Also used as the seed mixer.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// All randomness in the library flows from one root seed, split per purpose:
//   derive_seed(root, tag, i) = mix64(mix64(root ^ fnv1a64(tag)) ^ i * golden)
// Purpose tags in use: "graph", "stream", "hash", "shuffle", "trial".
inline uint64_t derive_seed(uint64_t root, std::string_view purpose, uint64_t index = 0) {
    return mix64(mix64(root ^ fnv1a64(purpose)) ^ index * 0x9e3779b97f4a7c15ULL);
}

// xoshiro256** 1.0 (Blackman/Vigna), seeded through splitmix64. Chosen over
// std::mt19937_64 because its output is identical on every platform and the
// bounded draws below avoid the implementation-defined std distributions.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& word : s_) {
            sm += 0x9e3779b97f4a7c15ULL;
            uint64_t z = sm;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    uint64_t next() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Unbiased draw in [0, bound) via Lemire's multiply-shift with rejection.
    uint64_t next_below(uint64_t bound) {
        unsigned __int128 m = (unsigned __int128)next() * bound;
        auto lo = (uint64_t)m;
        if (lo < bound) {
            const uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                m = (unsigned __int128)next() * bound;
                lo = (uint64_t)m;
            }
        }
        return (uint64_t)(m >> 64);
    }

    uint32_t next_below32(uint32_t bound) { return (uint32_t)next_below(bound); }

    // Uniform double in [0,1) with 53 random bits.
    double next_unit() { return (double)(next() >> 11) * 0x1.0p-53; }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

} // namespace cusketch
