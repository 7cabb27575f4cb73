#include <doctest.h>

#include <cmath>
#include <random>

#include "dedup_oracle.hpp"
#include "forge/error.hpp"
#include "support.hpp"

using namespace forge;

namespace {

ShingleSet make_set(std::vector<std::uint64_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return ShingleSet{"", std::move(v)};
}

/// Two random sets of the given sizes sharing `common` elements.
std::pair<ShingleSet, ShingleSet> overlapping(std::mt19937_64& rng, std::size_t only_a, std::size_t only_b,
                                              std::size_t common) {
    std::vector<std::uint64_t> a, b;
    for (std::size_t i = 0; i < common; ++i) {
        const auto x = rng();
        a.push_back(x);
        b.push_back(x);
    }
    for (std::size_t i = 0; i < only_a; ++i) a.push_back(rng());
    for (std::size_t i = 0; i < only_b; ++i) b.push_back(rng());
    return {make_set(a), make_set(b)};
}

Sample sample(const std::string& path, const std::string& code) {
    return make_sample(path, Origin::Collected, code);
}

}  // namespace

TEST_SUITE("dedup") {
    TEST_CASE("shingle window counts") {
        const auto seven = lex("a b c d e f g");
        REQUIRE(seven.size() == 7);
        CHECK(shingle(seven, 5).shingles.size() <= 3);
        CHECK(shingle(seven, 5).shingles.size() == 3);
        CHECK(shingle(seven, 7).shingles.size() == 1);
        CHECK(shingle(seven, 8).shingles.empty());
        CHECK(shingle(lex("x x x x x x x x"), 2).shingles.size() == 1);
        CHECK_THROWS_AS(shingle(seven, 0), ConfigError);
    }

    TEST_CASE("shingles ignore comments and layout") {
        const auto a = shingle(lex(testing::kHalfAdder), 5);
        const auto b = shingle(lex("module halfAdder( // ports\n input A, input B,\n output Sum, output Cout);"
                                   "/* logic */ assign Sum = A ^ B; assign Cout = A & B; endmodule"),
                               5);
        CHECK(a.shingles == b.shingles);
        CHECK(a.shingles == shingle(lex(testing::kHalfAdder), 5).shingles);
    }

    TEST_CASE("token boundaries are part of the shingle") {
        // "ab c" and "a bc" share no token, so their 2-shingles differ.
        CHECK(shingle(lex("ab c"), 2).shingles != shingle(lex("a bc"), 2).shingles);
    }

    TEST_CASE("exact_jaccard examples") {
        const auto x = make_set({1, 2, 3}), y = make_set({2, 3, 4});
        CHECK(exact_jaccard(x, y) == doctest::Approx(0.5));
        CHECK(exact_jaccard(x, x) == 1.0);
        CHECK(exact_jaccard(make_set({1, 2}), make_set({3, 4})) == 0.0);
        CHECK(exact_jaccard(make_set({}), make_set({})) == 1.0);
        CHECK(exact_jaccard(make_set({}), make_set({1})) == 0.0);
    }

    TEST_CASE("property: exact_jaccard is symmetric, reflexive, bounded and matches std::set") {
        std::mt19937_64 rng(5);
        for (int t = 0; t < 300; ++t) {
            std::vector<std::uint64_t> a, b;
            for (std::size_t i = rng() % 30; i > 0; --i) a.push_back(rng() % 40);
            for (std::size_t i = rng() % 30; i > 0; --i) b.push_back(rng() % 40);
            const auto sa = make_set(a), sb = make_set(b);
            const double j = exact_jaccard(sa, sb);
            REQUIRE(j == exact_jaccard(sb, sa));
            REQUIRE(j >= 0.0);
            REQUIRE(j <= 1.0);
            REQUIRE(exact_jaccard(sa, sa) == 1.0);
            REQUIRE(j == doctest::Approx(testing::set_jaccard(sa.shingles, sb.shingles)));
        }
    }

    TEST_CASE("minhash basics") {
        std::mt19937_64 rng(3);
        auto [a, b] = overlapping(rng, 10, 10, 50);
        const auto sa = minhash(a, 128, 42);
        CHECK(sa.sig.size() == 128);
        CHECK(sa.seed == 42);
        CHECK(minhash(a, 128, 42).sig == sa.sig);
        CHECK(estimate_jaccard(sa, minhash(a, 128, 42)) == 1.0);
        CHECK(minhash(a, 128, 43).sig != sa.sig);
        for (auto v : sa.sig) {
            CHECK(v != kEmptySignatureSlot);
        }
    }

    TEST_CASE("empty sets share a sentinel signature") {
        const auto e1 = minhash(make_set({}), 16, 1);
        const auto e2 = minhash(make_set({}), 16, 1);
        CHECK(e1.sig == e2.sig);
        CHECK(estimate_jaccard(e1, e2) == 1.0);
        const auto one = minhash(make_set({7}), 16, 1);
        CHECK(estimate_jaccard(e1, one) == 0.0);
    }

    TEST_CASE("disjoint large sets estimate near zero") {
        std::mt19937_64 rng(11);
        auto [a, b] = overlapping(rng, 500, 500, 0);
        CHECK(estimate_jaccard(minhash(a, 128, 1), minhash(b, 128, 1)) < 0.05);
    }

    TEST_CASE("planted J = 0.8 pair is estimated within 0.12 for at least 95% of seeds") {
        std::mt19937_64 rng(17);
        auto [a, b] = overlapping(rng, 25, 25, 200);  // 200 / 250
        REQUIRE(exact_jaccard(a, b) == doctest::Approx(0.8));
        int within = 0;
        const int seeds = 400;
        for (int s = 0; s < seeds; ++s) {
            const double est = estimate_jaccard(minhash(a, 128, static_cast<std::uint64_t>(s)),
                                                minhash(b, 128, static_cast<std::uint64_t>(s)));
            within += std::abs(est - 0.8) <= 0.12;
        }
        CHECK(within >= seeds * 95 / 100);
    }

    TEST_CASE("statistical: minhash is unbiased") {
        // Averaged over S seeds, the fraction of equal components is a
        // binomial mean over S*P trials; it must land within 3 sigma of J.
        std::mt19937_64 rng(23);
        for (auto [oa, ob, common] : {std::tuple{60, 60, 30}, std::tuple{10, 30, 160}, std::tuple{100, 0, 100}}) {
            auto [a, b] = overlapping(rng, static_cast<std::size_t>(oa), static_cast<std::size_t>(ob),
                                      static_cast<std::size_t>(common));
            const double j = exact_jaccard(a, b);
            const int seeds = 200;
            const int perms = 64;
            double sum = 0.0;
            for (int s = 0; s < seeds; ++s) {
                sum += estimate_jaccard(minhash(a, perms, 1000 + static_cast<std::uint64_t>(s)),
                                        minhash(b, perms, 1000 + static_cast<std::uint64_t>(s)));
            }
            const double mean = sum / seeds;
            const double sigma = std::sqrt(j * (1.0 - j) / (seeds * perms));
            CHECK(std::abs(mean - j) <= 3.0 * sigma + 1e-12);
        }
    }

    TEST_CASE("lsh_candidates") {
        MinHashSignature a{"a", {1, 2, 3, 4, 5, 6}, 0};
        MinHashSignature b{"b", {1, 2, 3, 4, 5, 6}, 0};
        MinHashSignature c{"c", {7, 8, 9, 10, 11, 12}, 0};
        MinHashSignature d{"d", {1, 2, 9, 10, 11, 0}, 0};  // matches a on band 0 only
        const auto pairs = lsh_candidates({a, b, c, d}, 3, 2);
        CHECK(pairs == std::vector<IndexPair>{{0, 1}, {0, 3}, {1, 3}, {2, 3}});
        // d matches c on band 1 (9, 10)
        CHECK(lsh_candidates({a, c}, 3, 2).empty());
        CHECK(lsh_candidates({a, b}, 1, 6).size() == 1);
        CHECK_THROWS_AS(lsh_candidates({a, b}, 4, 2), ConfigError);
        CHECK(lsh_candidates({}, 3, 2).empty());
    }

    TEST_CASE("params validation") {
        DedupParams p;
        CHECK_NOTHROW(p.validate());
        p.rows = 3;
        CHECK_THROWS_AS(p.validate(), ConfigError);
        p = DedupParams{};
        p.threshold = 0.0;
        CHECK_THROWS_AS(p.validate(), ConfigError);
        p.threshold = 1.0;
        CHECK_NOTHROW(p.validate());
        p.threshold = 1.01;
        CHECK_THROWS_AS(p.validate(), ConfigError);
        p = DedupParams{};
        p.shingle_k = 0;
        CHECK_THROWS_AS(p.validate(), ConfigError);
    }

    TEST_CASE("byte-identical files keep one copy") {
        auto r = dedup({sample("b/copy.v", std::string(testing::kHalfAdder)),
                        sample("a/orig.v", std::string(testing::kHalfAdder))},
                       DedupParams{});
        REQUIRE(r.kept.size() == 1);
        CHECK(r.kept[0].source_path == "a/orig.v");  // equal ids: smaller path wins
        REQUIRE(r.decisions.size() == 1);
        CHECK(r.decisions[0].dropped.at(0).source_path == "b/copy.v");
        CHECK(r.decisions[0].dropped.at(0).jaccard == 1.0);
    }

    TEST_CASE("a copy with different comments is a duplicate") {
        const std::string other = "// alternate header\n" + std::string(testing::kHalfAdder) + "/* trailer */\n";
        const auto a = sample("a.v", std::string(testing::kHalfAdder));
        const auto b = sample("b.v", other);
        REQUIRE(a.id != b.id);
        auto r = dedup({a, b}, DedupParams{});
        REQUIRE(r.kept.size() == 1);
        CHECK(r.kept[0].id == std::min(a.id, b.id));
    }

    TEST_CASE("distinct designs survive") {
        auto r = dedup({sample("h.v", std::string(testing::kHalfAdder)),
                        sample("c.v", "module counter(input clk, output reg [3:0] q);\n"
                                      "  always @(posedge clk) q <= q + 1;\nendmodule\n")},
                       DedupParams{});
        CHECK(r.kept.size() == 2);
        CHECK(r.decisions.empty());
    }

    TEST_CASE("planted corpus matches the brute-force oracle; sound, idempotent, deterministic") {
        const auto corpus = testing::planted_corpus(99, 200, 15);
        DedupParams params;
        const auto oracle = testing::oracle_dedup(corpus.samples, params.threshold, params.shingle_k);
        const auto r = dedup(corpus.samples, params);
        CHECK(testing::sorted_paths(r.kept) == oracle.kept_paths);

        // soundness: every drop names a partner at or above the threshold
        std::map<std::string, const Sample*> by_id;
        for (const auto& s : corpus.samples) by_id[s.id] = &s;
        for (const auto& d : r.decisions) {
            for (const auto& x : d.dropped) {
                REQUIRE(x.jaccard >= params.threshold);
                const auto sa = shingle(lex(by_id.at(x.id)->code), params.shingle_k);
                const auto sb = shingle(lex(by_id.at(x.partner_id)->code), params.shingle_k);
                CHECK(exact_jaccard(sa, sb) == doctest::Approx(x.jaccard));
            }
        }
        std::size_t dropped = 0;
        for (const auto& d : r.decisions) dropped += d.dropped.size();
        CHECK(dropped + r.kept.size() == corpus.samples.size());

        const auto again = dedup(r.kept, params);
        CHECK(again.kept == r.kept);

        auto shuffled = corpus.samples;
        std::mt19937_64 rng(1);
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        params.jobs = 3;
        CHECK(testing::sorted_paths(dedup(shuffled, params).kept) == oracle.kept_paths);
    }

    TEST_CASE("decision log") {
        const auto a = sample("a.v", std::string(testing::kHalfAdder));
        auto r = dedup({a, sample("b.v", std::string(testing::kHalfAdder))}, DedupParams{});
        const auto j = decisions_to_json(r, DedupParams{}, 2);
        CHECK(j.at("in") == 2);
        CHECK(j.at("kept") == 1);
        CHECK(j.at("dropped") == 1);
        CHECK(j.at("params").at("threshold") == 0.85);
        CHECK(j.at("groups").at(0).at("dropped").at(0).at("exact_jaccard") == 1.0);
    }

    TEST_CASE("unlexable input is a consistency error") {
        CHECK_THROWS_AS(dedup({sample("x.v", "module x; /* open")}, DedupParams{}), ConsistencyError);
    }
}
