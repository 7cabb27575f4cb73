#include "forge/dedup.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <tuple>
#include <unordered_map>

#include "forge/error.hpp"
#include "forge/parallel.hpp"
#include "forge/random.hpp"

namespace forge {

namespace {

constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;
constexpr std::uint64_t kFnvOffset = 0xCBF29CE484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001B3ULL;

std::uint64_t mod_mersenne61(unsigned __int128 x) {
    // x mod (2^61 - 1) by folding; x < 2^122 here.
    std::uint64_t lo = static_cast<std::uint64_t>(x & kMersenne61);
    std::uint64_t hi = static_cast<std::uint64_t>(x >> 61);
    std::uint64_t r = lo + (hi & kMersenne61) + (hi >> 61);
    r = (r & kMersenne61) + (r >> 61);
    return r >= kMersenne61 ? r - kMersenne61 : r;
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent_[std::max(a, b)] = std::min(a, b);
        }
    }

private:
    std::vector<std::size_t> parent_;
};

struct VerifiedPair {
    std::size_t a;
    std::size_t b;
    double jaccard;
};

}  // namespace

void DedupParams::validate() const {
    if (shingle_k < 1) {
        throw ConfigError("shingle k must be >= 1");
    }
    if (perms < 1) {
        throw ConfigError("number of permutations must be >= 1");
    }
    if (bands * rows != perms) {
        throw ConfigError("bands x rows (" + std::to_string(bands) + " x " + std::to_string(rows) +
                          ") must equal permutations (" + std::to_string(perms) + ")");
    }
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw ConfigError("threshold must lie in (0, 1]");
    }
}

ShingleSet shingle(const std::vector<Token>& tokens, std::size_t k, std::string sample_id) {
    if (k < 1) {
        throw ConfigError("shingle k must be >= 1");
    }
    ShingleSet set{std::move(sample_id), {}};
    if (tokens.size() < k) {
        return set;
    }
    set.shingles.reserve(tokens.size() - k + 1);
    for (std::size_t start = 0; start + k <= tokens.size(); ++start) {
        std::uint64_t h = kFnvOffset;
        for (std::size_t i = start; i < start + k; ++i) {
            for (unsigned char c : tokens[i].text) {
                h = (h ^ c) * kFnvPrime;
            }
            // 0xFF never occurs in UTF-8, so window boundaries are unambiguous
            h = (h ^ 0xFF) * kFnvPrime;
        }
        set.shingles.push_back(splitmix64(h));
    }
    std::sort(set.shingles.begin(), set.shingles.end());
    set.shingles.erase(std::unique(set.shingles.begin(), set.shingles.end()), set.shingles.end());
    return set;
}

double exact_jaccard(const ShingleSet& a, const ShingleSet& b) {
    const auto& x = a.shingles;
    const auto& y = b.shingles;
    if (x.empty() && y.empty()) {
        return 1.0;
    }
    std::size_t inter = 0;
    for (std::size_t i = 0, j = 0; i < x.size() && j < y.size();) {
        if (x[i] < y[j]) {
            ++i;
        } else if (y[j] < x[i]) {
            ++j;
        } else {
            ++inter;
            ++i;
            ++j;
        }
    }
    const std::size_t uni = x.size() + y.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

MinHashSignature minhash(const ShingleSet& s, std::size_t perms, std::uint64_t seed) {
    if (perms < 1) {
        throw ConfigError("number of permutations must be >= 1");
    }
    MinHashSignature out{s.sample_id, std::vector<std::uint64_t>(perms, kEmptySignatureSlot), seed};
    if (s.shingles.empty()) {
        return out;
    }

    // h_i(x) = (a_i * x + b_i) mod (2^61 - 1)
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> mul(perms), add(perms);
    for (std::size_t i = 0; i < perms; ++i) {
        mul[i] = 1 + uniform_index(rng, kMersenne61 - 1);
        add[i] = uniform_index(rng, kMersenne61);
    }
    for (std::uint64_t shingle_hash : s.shingles) {
        const std::uint64_t x = mod_mersenne61(shingle_hash);
        for (std::size_t i = 0; i < perms; ++i) {
            const auto v = mod_mersenne61(static_cast<unsigned __int128>(mul[i]) * x + add[i]);
            out.sig[i] = std::min(out.sig[i], v);
        }
    }
    return out;
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
    if (a.sig.size() != b.sig.size() || a.sig.empty()) {
        throw ConfigError("signatures must have the same, non-zero length");
    }
    std::size_t equal = 0;
    for (std::size_t i = 0; i < a.sig.size(); ++i) {
        equal += a.sig[i] == b.sig[i] ? 1 : 0;
    }
    return static_cast<double>(equal) / static_cast<double>(a.sig.size());
}

std::vector<IndexPair> lsh_candidates(const std::vector<MinHashSignature>& signatures,
                                      std::size_t bands, std::size_t rows) {
    if (bands < 1 || rows < 1) {
        throw ConfigError("bands and rows must be >= 1");
    }
    for (const auto& s : signatures) {
        if (s.sig.size() != bands * rows) {
            throw ConfigError("bands x rows (" + std::to_string(bands * rows) +
                              ") does not match signature length (" + std::to_string(s.sig.size()) + ")");
        }
    }

    std::vector<IndexPair> pairs;
    for (std::size_t band = 0; band < bands; ++band) {
        const std::size_t offset = band * rows;
        auto band_less = [&](std::size_t x, std::size_t y) {
            const auto& a = signatures[x].sig;
            const auto& b = signatures[y].sig;
            return std::lexicographical_compare(a.begin() + offset, a.begin() + offset + rows,
                                                b.begin() + offset, b.begin() + offset + rows);
        };

        std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
        for (std::size_t i = 0; i < signatures.size(); ++i) {
            std::uint64_t h = kFnvOffset;
            for (std::size_t r = 0; r < rows; ++r) {
                h = splitmix64(h ^ signatures[i].sig[offset + r]);
            }
            buckets[h].push_back(i);
        }
        for (auto& [key, members] : buckets) {
            if (members.size() < 2) {
                continue;
            }
            // a bucket may mix different bands on hash collision; split by exact rows
            std::stable_sort(members.begin(), members.end(), band_less);
            for (std::size_t lo = 0; lo < members.size();) {
                std::size_t hi = lo + 1;
                while (hi < members.size() && !band_less(members[lo], members[hi])) {
                    ++hi;
                }
                for (std::size_t x = lo; x < hi; ++x) {
                    for (std::size_t y = x + 1; y < hi; ++y) {
                        pairs.emplace_back(std::min(members[x], members[y]), std::max(members[x], members[y]));
                    }
                }
                lo = hi;
            }
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

DedupResult dedup(std::vector<Sample> samples, const DedupParams& params) {
    params.validate();
    const std::size_t n = samples.size();
    const std::size_t jobs = params.jobs == 0 ? default_jobs() : params.jobs;

    std::vector<ShingleSet> shingles(n);
    std::vector<MinHashSignature> signatures(n);
    parallel_for(n, jobs, [&](std::size_t i) {
        std::vector<Token> tokens;
        try {
            tokens = lex(samples[i].code);
        } catch (const LexError& e) {
            throw ConsistencyError("sample " + samples[i].source_path +
                                   " does not lex (" + e.what() + "); run the module filter first");
        }
        shingles[i] = shingle(tokens, params.shingle_k, samples[i].id);
        signatures[i] = minhash(shingles[i], params.perms, params.seed);
    });

    const auto candidates = lsh_candidates(signatures, params.bands, params.rows);
    std::vector<double> scores(candidates.size());
    parallel_for(candidates.size(), jobs, [&](std::size_t c) {
        scores[c] = exact_jaccard(shingles[candidates[c].first], shingles[candidates[c].second]);
    });

    std::vector<VerifiedPair> verified;
    UnionFind groups(n);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (scores[c] >= params.threshold) {
            verified.push_back({candidates[c].first, candidates[c].second, scores[c]});
            groups.unite(candidates[c].first, candidates[c].second);
        }
    }

    auto sample_less = [&](std::size_t x, std::size_t y) {
        return std::tie(samples[x].id, samples[x].source_path) < std::tie(samples[y].id, samples[y].source_path);
    };

    std::map<std::size_t, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < n; ++i) {
        members[groups.find(i)].push_back(i);
    }

    // strongest verified neighbour of every sample
    std::vector<std::pair<std::size_t, double>> best(n, {n, -1.0});
    auto offer = [&](std::size_t self, std::size_t other, double j) {
        auto& [who, score] = best[self];
        if (j > score || (j == score && sample_less(other, who))) {
            who = other;
            score = j;
        }
    };
    for (const auto& p : verified) {
        offer(p.a, p.b, p.jaccard);
        offer(p.b, p.a, p.jaccard);
    }

    std::vector<bool> keep(n, false);
    DedupResult result;
    for (auto& [root, group] : members) {
        std::sort(group.begin(), group.end(), sample_less);
        keep[group.front()] = true;
        if (group.size() == 1) {
            continue;
        }
        DedupDecision decision;
        decision.kept_id = samples[group.front()].id;
        decision.kept_source_path = samples[group.front()].source_path;
        for (std::size_t g = 1; g < group.size(); ++g) {
            const std::size_t i = group[g];
            decision.dropped.push_back(
                {samples[i].id, samples[i].source_path, samples[best[i].first].id, best[i].second});
        }
        result.decisions.push_back(std::move(decision));
    }
    std::sort(result.decisions.begin(), result.decisions.end(), [](const auto& x, const auto& y) {
        return std::tie(x.kept_id, x.kept_source_path) < std::tie(y.kept_id, y.kept_source_path);
    });

    for (std::size_t i = 0; i < n; ++i) {
        if (keep[i]) {
            result.kept.push_back(std::move(samples[i]));
        }
    }
    result.candidate_pairs = candidates.size();
    result.verified_pairs = verified.size();
    return result;
}

nlohmann::ordered_json decisions_to_json(const DedupResult& result, const DedupParams& params,
                                         std::size_t input_count) {
    nlohmann::ordered_json groups = nlohmann::ordered_json::array();
    for (const auto& d : result.decisions) {
        nlohmann::ordered_json dropped = nlohmann::ordered_json::array();
        for (const auto& x : d.dropped) {
            dropped.push_back({{"id", x.id},
                               {"source_path", x.source_path},
                               {"partner_id", x.partner_id},
                               {"exact_jaccard", x.jaccard}});
        }
        groups.push_back({{"kept_id", d.kept_id},
                          {"kept_source_path", d.kept_source_path},
                          {"dropped", std::move(dropped)}});
    }
    return {{"params",
             {{"threshold", params.threshold},
              {"shingle_k", params.shingle_k},
              {"perms", params.perms},
              {"bands", params.bands},
              {"rows", params.rows},
              {"seed", params.seed}}},
            {"in", input_count},
            {"kept", result.kept.size()},
            {"dropped", input_count - result.kept.size()},
            {"candidate_pairs", result.candidate_pairs},
            {"verified_pairs", result.verified_pairs},
            {"groups", std::move(groups)}};
}

}  // namespace forge
