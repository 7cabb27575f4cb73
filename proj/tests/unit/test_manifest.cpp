#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "forge/error.hpp"
#include "forge/layering.hpp"
#include "forge/manifest.hpp"
#include "support.hpp"

using namespace forge;

namespace {

Sample labeled(int index, int layer, Complexity tier) {
    Sample s = make_sample("s" + std::to_string(index) + ".v", Origin::Collected,
                           "module s" + std::to_string(index) + "; endmodule\n");
    s.layer = layer;
    s.complexity = tier;
    s.rank = 10;
    s.compile_status = CompileStatus::Clean;
    s.description = "design " + std::to_string(index);
    return s;
}

std::vector<Sample> random_layered(std::mt19937_64& rng, std::size_t n) {
    std::vector<Sample> out;
    for (std::size_t i = 0; i < n; ++i) {
        Sample s = make_sample("r" + std::to_string(i) + ".v", Origin::Collected,
                               "module r" + std::to_string(i) + "; endmodule\n");
        s.rank = static_cast<int>(rng() % 21);
        s.compile_status = rng() % 4 == 0 ? CompileStatus::DependencyIssue : CompileStatus::Clean;
        s.complexity = kAllComplexities[rng() % 4];
        s.description = "d" + std::to_string(i);
        s.layer = assign_layer(s).layer;
        out.push_back(std::move(s));
    }
    return out;
}

template <typename F>
std::multiset<std::string> collect(const std::vector<Sample>& samples, F f) {
    std::multiset<std::string> out;
    for (const auto& s : samples) out.insert(f(s));
    return out;
}

}  // namespace

TEST_SUITE("manifest") {
    TEST_CASE("phase numbering") {
        CHECK(phase_of(1, Complexity::Basic) == 0);
        CHECK(phase_of(1, Complexity::Expert) == 3);
        CHECK(phase_of(2, Complexity::Basic) == 4);
        CHECK(phase_of(6, Complexity::Expert) == 23);
        CHECK_THROWS_AS(phase_of(0, Complexity::Basic), ConfigError);
    }

    TEST_CASE("phase order example") {
        const auto m = build_manifest({labeled(0, 2, Complexity::Advanced), labeled(1, 1, Complexity::Basic),
                                       labeled(2, 1, Complexity::Expert)},
                                      1, 7);
        REQUIRE(m.size() == 3);
        CHECK(m[0].phase == 0);
        CHECK(m[1].phase == 3);
        CHECK(m[2].phase == 6);
        CHECK(m[0].sample_id == labeled(1, 1, Complexity::Basic).id);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(m[i].order == i);
            CHECK(m[i].epochs == 1);
        }
    }

    TEST_CASE("single phase is a seeded permutation") {
        std::vector<Sample> same;
        for (int i = 0; i < 30; ++i) same.push_back(labeled(i, 3, Complexity::Intermediate));
        const auto a = build_manifest(same, 2, 7);
        const auto b = build_manifest(same, 2, 7);
        const auto c = build_manifest(same, 2, 8);
        CHECK(a == b);
        CHECK(a != c);
        std::set<std::string> ids;
        for (const auto& e : a) {
            CHECK(e.phase == 9);
            CHECK(e.epochs == 2);
            CHECK(e.loss_weight == 0.6);
            ids.insert(e.sample_id);
        }
        CHECK(ids.size() == 30);

        // input order does not matter
        auto reversed = same;
        std::reverse(reversed.begin(), reversed.end());
        CHECK(build_manifest(reversed, 2, 7) == a);
    }

    TEST_CASE("weights follow the layer table") {
        std::vector<Sample> s;
        for (int l = 1; l <= 6; ++l) s.push_back(labeled(l, l, Complexity::Basic));
        const auto m = build_manifest(s, 1, 0);
        const double expected[] = {1.0, 0.8, 0.6, 0.4, 0.2, 0.1};
        REQUIRE(m.size() == 6);
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(m[i].loss_weight == expected[i]);
        }
    }

    TEST_CASE("property: monotone phases, every sample once, order is 0..N-1") {
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 20; ++trial) {
            const auto samples = random_layered(rng, 1 + rng() % 300);
            const auto m = build_manifest(samples, 1, rng());
            REQUIRE(m.size() == samples.size());
            std::map<std::string, const Sample*> by_id;
            for (const auto& s : samples) by_id[s.id] = &s;
            std::set<std::string> seen;
            for (std::size_t i = 0; i < m.size(); ++i) {
                REQUIRE(m[i].order == i);
                if (i > 0) REQUIRE(m[i - 1].phase <= m[i].phase);
                const Sample& s = *by_id.at(m[i].sample_id);
                REQUIRE(m[i].phase == 4 * (*s.layer - 1) + tier_index(*s.complexity));
                REQUIRE(m[i].loss_weight == layer_weight(*s.layer));
                REQUIRE(m[i].code == s.code);
                seen.insert(m[i].sample_id);
            }
            CHECK(seen.size() == samples.size());
        }
    }

    TEST_CASE("unlabeled input is fatal") {
        auto s = labeled(0, 1, Complexity::Basic);
        s.complexity.reset();
        CHECK_THROWS_AS(build_manifest({s}, 1, 0), UnlabeledSample);
        s = labeled(0, 1, Complexity::Basic);
        s.layer.reset();
        CHECK_THROWS_AS(build_manifest({s}, 1, 0), UnlabeledSample);
        CHECK_THROWS_AS(build_manifest({labeled(0, 1, Complexity::Basic)}, 0, 0), ConfigError);
    }

    TEST_CASE("missing description becomes empty string") {
        auto s = labeled(0, 1, Complexity::Basic);
        s.description.reset();
        CHECK(build_manifest({s}, 1, 0).at(0).description.empty());
    }

    TEST_CASE("JSONL rendering and round-trip") {
        auto s = labeled(0, 2, Complexity::Basic);
        s.description = "caf\xC3\xA9 \"quoted\"";
        const auto m = build_manifest({s}, 1, 0);
        const auto text = render_manifest(m);
        CHECK(text.starts_with("{\"sample_id\":\"" + s.id + "\",\"phase\":4,\"order\":0,\"loss_weight\":0.8,"
                               "\"epochs\":1,\"description\":\"caf\xC3\xA9 \\\"quoted\\\"\",\"code\":"));
        CHECK(text.ends_with("}\n"));
        testing::TempDir dir;
        write_manifest(dir / "m.jsonl", m);
        CHECK(read_manifest(dir / "m.jsonl") == m);
    }

    TEST_CASE("corruption: three rows are all mismatched") {
        std::vector<Sample> rows = {labeled(0, 1, Complexity::Basic), labeled(1, 2, Complexity::Basic),
                                    labeled(2, 3, Complexity::Basic)};
        rows[0].rank = 20;
        rows[1].rank = 16;
        rows[2].rank = 11;
        const auto c = corrupt_dataset(rows, 13);
        REQUIRE(c.size() == 3);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(c[i].code != rows[i].code);
            CHECK(c[i].description != rows[i].description);
            CHECK(c[i].rank != rows[i].rank);
            CHECK(c[i].id == rows[i].id);
            CHECK(c[i].layer == assign_layer(*c[i].rank, CompileStatus::Clean).layer);
        }
        CHECK(corrupt_dataset(rows, 13) == c);
        CHECK_THROWS_AS(corrupt_dataset({rows[0]}, 1), ConfigError);
    }

    TEST_CASE("corruption preserves multisets, also when applied twice") {
        std::mt19937_64 rng(4);
        const auto samples = random_layered(rng, 200);
        const auto once = corrupt_dataset(samples, 1);
        const auto twice = corrupt_dataset(once, 2);
        auto code = [](const Sample& s) { return s.code; };
        auto desc = [](const Sample& s) { return *s.description; };
        auto rank = [](const Sample& s) { return std::to_string(*s.rank); };
        for (const auto* v : {&once, &twice}) {
            CHECK(collect(*v, code) == collect(samples, code));
            CHECK(collect(*v, desc) == collect(samples, desc));
            CHECK(collect(*v, rank) == collect(samples, rank));
        }
        // the corrupted set still builds a structurally valid manifest
        const auto m = build_manifest(once, 1, 7);
        CHECK(m.size() == samples.size());
        for (std::size_t i = 1; i < m.size(); ++i) {
            CHECK(m[i - 1].phase <= m[i].phase);
        }
    }
}
