#pragma once

// Portable seeded randomness. std::mt19937_64 output is fully specified by the
// standard, but std::shuffle and the <random> distributions are not, so index
// draws and permutations are built here from raw engine output. This keeps
// manifests byte-identical across standard library implementations.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace forge {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent sub-seed for stream `stream` of a user seed.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

/// Uniform integer in [0, bound) by rejection; bound must be > 0.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t x = rng();
        if (x >= threshold) {
            return x % bound;
        }
    }
}

/// Fisher-Yates, high index down to 1.
template <typename T>
void seeded_shuffle(std::span<T> items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

/// Uniformly random permutation of 0..n-1 without fixed points (n >= 2).
std::vector<std::size_t> random_derangement(std::size_t n, std::uint64_t seed);

}  // namespace forge
