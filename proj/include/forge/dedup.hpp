#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/sample.hpp"
#include "forge/verilog_lex.hpp"

namespace forge {

/// Sorted, duplicate-free 64-bit hashes of every k-token window.
struct ShingleSet {
    std::string sample_id;
    std::vector<std::uint64_t> shingles;
};

struct MinHashSignature {
    std::string sample_id;
    std::vector<std::uint64_t> sig;
    std::uint64_t seed = 0;
};

/// Component value used for every slot of an empty set's signature. Real
/// minima are reduced modulo 2^61 - 1 and can never reach it.
inline constexpr std::uint64_t kEmptySignatureSlot = ~std::uint64_t{0};

struct DroppedSample {
    std::string id;
    std::string source_path;
    std::string partner_id;  // verified neighbour inside the same group
    double jaccard = 0.0;    // exact, >= threshold
};

struct DedupDecision {
    std::string kept_id;
    std::string kept_source_path;
    std::vector<DroppedSample> dropped;
};

struct DedupParams {
    double threshold = 0.85;
    std::size_t shingle_k = 5;
    std::size_t perms = 128;
    std::size_t bands = 32;
    std::size_t rows = 4;
    std::uint64_t seed = 42;
    std::size_t jobs = 0;  // 0: hardware concurrency

    /// Throws ConfigError unless k >= 1, P >= 1, B*R == P and 0 < t <= 1.
    void validate() const;
};

/// Candidate pair of signature indices, first < second.
using IndexPair = std::pair<std::size_t, std::size_t>;

ShingleSet shingle(const std::vector<Token>& tokens, std::size_t k, std::string sample_id = {});

/// |a & b| / |a | b|, with J(empty, empty) = 1.
double exact_jaccard(const ShingleSet& a, const ShingleSet& b);

MinHashSignature minhash(const ShingleSet& s, std::size_t perms, std::uint64_t seed);

/// Fraction of equal components. Signatures must have equal length.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

/// Pairs whose signatures agree on every row of at least one band, sorted
/// and unique. Throws ConfigError if bands * rows differs from the
/// signature length.
std::vector<IndexPair> lsh_candidates(const std::vector<MinHashSignature>& signatures,
                                      std::size_t bands, std::size_t rows);

struct DedupResult {
    std::vector<Sample> kept;  // input order
    std::vector<DedupDecision> decisions;  // sorted by kept_id
    std::size_t candidate_pairs = 0;
    std::size_t verified_pairs = 0;
};

/// Near-duplicate removal: LSH proposes pairs, exact Jaccard confirms them,
/// confirmed pairs are merged with union-find and each group keeps the
/// sample with the smallest (id, source_path).
DedupResult dedup(std::vector<Sample> samples, const DedupParams& params);

nlohmann::ordered_json decisions_to_json(const DedupResult& result, const DedupParams& params,
                                         std::size_t input_count);

}  // namespace forge
