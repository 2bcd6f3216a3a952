#pragma once

#include <cstdint>
#include <random>

namespace wg {

// Counter-based seed mixing (splitmix64 finalizer). Streams for different
// (point, sample, agent) tuples are derived from one master seed so that
// sweep results do not depend on execution order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::uint64_t point = 0,
                                 std::uint64_t sample = 0,
                                 std::uint64_t agent = 0) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ splitmix64(point + 0x100000001ULL));
    h = splitmix64(h ^ splitmix64(sample + 0x200000002ULL));
    h = splitmix64(h ^ splitmix64(agent + 0x300000003ULL));
    return h;
}

using Rng = std::mt19937_64;

inline int random_bit(Rng& rng) {
    return static_cast<int>(std::uniform_int_distribution<int>(0, 1)(rng));
}

}  // namespace wg
