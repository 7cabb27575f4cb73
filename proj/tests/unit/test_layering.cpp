#include <doctest.h>

#include <random>

#include "forge/error.hpp"
#include "forge/layering.hpp"

using namespace forge;

namespace {

Sample ranked(int rank, CompileStatus status, Complexity tier = Complexity::Basic) {
    Sample s = make_sample("r" + std::to_string(rank) + ".v", Origin::Collected,
                           "module r" + std::to_string(rank) + "; endmodule");
    s.rank = rank;
    s.compile_status = status;
    s.complexity = tier;
    return s;
}

}  // namespace

TEST_SUITE("layering") {
    TEST_CASE("published examples") {
        auto a = assign_layer(20, CompileStatus::Clean);
        CHECK(a.layer == 1);
        CHECK(a.loss_weight == 1.0);
        a = assign_layer(17, CompileStatus::DependencyIssue);
        CHECK(a.layer == 6);
        CHECK(a.loss_weight == 0.1);
        a = assign_layer(0, CompileStatus::Clean);
        CHECK(a.layer == 6);
        CHECK(a.loss_weight == 0.1);
    }

    TEST_CASE("weight table") {
        const double expected[] = {1.0, 0.8, 0.6, 0.4, 0.2, 0.1};
        for (int layer = 1; layer <= 6; ++layer) {
            CHECK(layer_weight(layer) == expected[layer - 1]);
        }
        CHECK_THROWS_AS(layer_weight(0), ConfigError);
        CHECK_THROWS_AS(layer_weight(7), ConfigError);
    }

    TEST_CASE("rank ranges partition 0..20 and layers 1-5 are clean only") {
        std::array<int, 7> clean_hits{};
        for (int rank = 0; rank <= 20; ++rank) {
            const auto c = assign_layer(rank, CompileStatus::Clean);
            REQUIRE(c.layer >= 1);
            REQUIRE(c.layer <= 6);
            ++clean_hits[static_cast<std::size_t>(c.layer)];
            CHECK(assign_layer(rank, CompileStatus::DependencyIssue).layer == 6);
        }
        CHECK(clean_hits[1] == 1);
        CHECK(clean_hits[2] == 5);
        CHECK(clean_hits[3] == 5);
        CHECK(clean_hits[4] == 5);
        CHECK(clean_hits[5] == 4);
        CHECK(clean_hits[6] == 1);
    }

    TEST_CASE("invalid inputs") {
        CHECK_THROWS_AS(assign_layer(21, CompileStatus::Clean), ConfigError);
        CHECK_THROWS_AS(assign_layer(-1, CompileStatus::Clean), ConfigError);
        CHECK_THROWS_AS(assign_layer(5, CompileStatus::SyntaxError), ConfigError);
        Sample s = ranked(3, CompileStatus::Clean);
        s.rank.reset();
        CHECK_THROWS_AS(assign_layer(s), UnlabeledSample);
        s = ranked(3, CompileStatus::Clean);
        s.compile_status.reset();
        CHECK_THROWS_AS(assign_layer(s), UnlabeledSample);
    }

    TEST_CASE("layer_report: one per layer, empty input, histogram oracle") {
        std::vector<Sample> six = {ranked(20, CompileStatus::Clean), ranked(16, CompileStatus::Clean),
                                   ranked(12, CompileStatus::Clean), ranked(6, CompileStatus::Clean),
                                   ranked(2, CompileStatus::Clean),  ranked(9, CompileStatus::DependencyIssue)};
        apply_layers(six);
        const auto r = layer_report(six);
        for (auto c : r.layer_counts) {
            CHECK(c == 1);
        }
        CHECK(r.total() == 6);

        const auto empty = layer_report({});
        CHECK(empty.total() == 0);
        for (auto c : empty.layer_counts) {
            CHECK(c == 0);
        }

        // 100 samples with known ranks; count layers by explicit range checks
        std::mt19937_64 rng(8);
        std::vector<Sample> many;
        std::array<std::size_t, 6> expected{};
        for (int i = 0; i < 100; ++i) {
            const int rank = static_cast<int>(rng() % 21);
            const bool dep = rng() % 5 == 0;
            many.push_back(ranked(rank, dep ? CompileStatus::DependencyIssue : CompileStatus::Clean,
                                  kAllComplexities[rng() % 4]));
            std::size_t layer;
            if (dep || rank == 0) layer = 6;
            else if (rank == 20) layer = 1;
            else if (rank >= 15) layer = 2;
            else if (rank >= 10) layer = 3;
            else if (rank >= 5) layer = 4;
            else layer = 5;
            ++expected[layer - 1];
        }
        apply_layers(many);
        const auto mr = layer_report(many);
        CHECK(mr.layer_counts == expected);
        CHECK(mr.total() == 100);
        std::size_t tiers = 0;
        for (const auto& row : mr.tier_counts) {
            for (auto c : row) tiers += c;
        }
        CHECK(tiers == 100);
    }

    TEST_CASE("report needs layered samples; JSON and text rendering") {
        CHECK_THROWS_AS(layer_report({ranked(3, CompileStatus::Clean)}), UnlabeledSample);
        std::vector<Sample> s = {ranked(20, CompileStatus::Clean, Complexity::Expert)};
        s[0].complexity.reset();
        apply_layers(s);
        const auto r = layer_report(s);
        CHECK(r.unknown_tier == 1);
        const auto j = r.to_json();
        CHECK(j.at("total") == 1);
        CHECK(j.at("layers").size() == 6);
        CHECK(j.at("layers").at(0).at("loss_weight") == 1.0);
        CHECK(j.at("layers").at(0).at("count") == 1);
        CHECK(r.render().find("    1     1.0") != std::string::npos);
    }
}
