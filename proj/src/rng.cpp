#include "glovekit/rng.hpp"

namespace glovekit {

std::uint64_t SplitMix64::below(std::uint64_t n) {
    std::uint64_t x = next();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
        std::uint64_t threshold = (0 - n) % n;
        while (lo < threshold) {
            x = next();
            m = static_cast<unsigned __int128>(x) * n;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SplitMix64 substream(std::uint64_t seed, RngStage stage, std::uint64_t index) {
    std::uint64_t s = mix64(seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(stage) + 1));
    s = mix64(s + 0x9E3779B97F4A7C15ULL * (index + 1));
    return SplitMix64(s);
}

} // namespace glovekit
