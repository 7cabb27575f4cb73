#include "forge/random.hpp"

#include <numeric>

#include "forge/error.hpp"

namespace forge {

std::vector<std::size_t> random_derangement(std::size_t n, std::uint64_t seed) {
    if (n < 2) {
        throw ConfigError("a derangement needs at least 2 elements");
    }
    // Rejection over uniform permutations; about e draws on average.
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> perm(n);
    for (;;) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        seeded_shuffle(std::span<std::size_t>(perm), rng);
        bool fixed = false;
        for (std::size_t i = 0; i < n && !fixed; ++i) {
            fixed = perm[i] == i;
        }
        if (!fixed) {
            return perm;
        }
    }
}

}  // namespace forge
