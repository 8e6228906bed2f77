#pragma once

#include <cstdint>
#include <random>

namespace qcrypt {

// splitmix64, used to whiten seeds and derive independent substreams.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based substream derivation: the pair (master, counter) maps to a
// seed that is stable regardless of how many other substreams were drawn,
// so serial and parallel trial execution produce identical results.
inline uint64_t substream_seed(uint64_t master, uint64_t counter) {
    uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (counter + 1));
    uint64_t a = splitmix64(s);
    uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t master, uint64_t counter = 0) {
    return Rng(substream_seed(master, counter));
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline int uniform_bit(Rng& rng) {
    return static_cast<int>(rng() & 1ULL);
}

inline int uniform_int(Rng& rng, int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace qcrypt
