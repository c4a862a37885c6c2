#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace glovekit {

/// splitmix64. The output sequence is a pure function of the seed, so every
/// shuffle, initializer and sample drawn from it reproduces bit-for-bit on
/// any platform. This is the single generator used across the project;
/// run manifests record it as "splitmix64".
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Unbiased draw in [0, n). Lemire multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n);

    /// Uniform double in [0, 1), 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Substream tags. Each (seed, stage, index) triple yields an independent
/// deterministic stream; buckets and threads never share one.
enum class RngStage : std::uint64_t {
    shuffle_chunk = 1,
    shuffle_bucket = 2,
    shuffle_final = 3,
    param_init = 4,
    sampling = 5,
    synth = 6,
};

std::uint64_t mix64(std::uint64_t z);
SplitMix64 substream(std::uint64_t seed, RngStage stage, std::uint64_t index);

/// In-place Fisher-Yates driven by the given stream.
template <typename T>
void fisher_yates(std::span<T> items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace glovekit
