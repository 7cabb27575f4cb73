#include "forge/layering.hpp"

#include <iomanip>
#include <numeric>
#include <sstream>

#include "forge/error.hpp"

namespace forge {

double layer_weight(int layer) {
    if (layer < 1 || layer > kLayerCount) {
        throw ConfigError("layer " + std::to_string(layer) + " outside [1, 6]");
    }
    return kLayerWeights[static_cast<std::size_t>(layer - 1)];
}

LayerAssignment assign_layer(int rank, CompileStatus status) {
    if (rank < kMinRank || rank > kMaxRank) {
        throw ConfigError("rank " + std::to_string(rank) + " outside [0, 20]");
    }
    if (status == CompileStatus::SyntaxError) {
        throw ConfigError("samples with syntax errors are never layered");
    }
    int layer = 6;
    if (status == CompileStatus::Clean) {
        if (rank == 20) layer = 1;
        else if (rank >= 15) layer = 2;
        else if (rank >= 10) layer = 3;
        else if (rank >= 5) layer = 4;
        else if (rank >= 1) layer = 5;
    }
    return {layer, layer_weight(layer)};
}

LayerAssignment assign_layer(const Sample& sample) {
    if (!sample.rank || !sample.compile_status) {
        throw UnlabeledSample("sample " + sample.id + " (" + sample.source_path + ") lacks " +
                              (sample.rank ? "a compile status" : "a rank"));
    }
    return assign_layer(*sample.rank, *sample.compile_status);
}

void apply_layers(std::vector<Sample>& samples) {
    for (auto& s : samples) {
        s.layer = assign_layer(s).layer;
    }
}

std::size_t LayerReport::total() const {
    return std::accumulate(layer_counts.begin(), layer_counts.end(), std::size_t{0});
}

nlohmann::ordered_json LayerReport::to_json() const {
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (int l = 0; l < kLayerCount; ++l) {
        nlohmann::ordered_json tiers;
        for (Complexity tier : kAllComplexities) {
            tiers[std::string(to_string(tier))] = tier_counts[l][tier_index(tier)];
        }
        layers.push_back({{"layer", l + 1},
                          {"loss_weight", kLayerWeights[l]},
                          {"count", layer_counts[l]},
                          {"tiers", std::move(tiers)}});
    }
    return {{"total", total()}, {"unknown_tier", unknown_tier}, {"layers", std::move(layers)}};
}

std::string LayerReport::render() const {
    std::ostringstream out;
    out << "layer  weight      count     Basic  Intermediate  Advanced    Expert\n";
    for (int l = 0; l < kLayerCount; ++l) {
        out << std::setw(5) << (l + 1) << "  " << std::setw(6) << std::fixed << std::setprecision(1)
            << kLayerWeights[l] << "  " << std::setw(9) << layer_counts[l];
        out << "  " << std::setw(8) << tier_counts[l][0] << "  " << std::setw(12) << tier_counts[l][1]
            << "  " << std::setw(8) << tier_counts[l][2] << "  " << std::setw(8) << tier_counts[l][3] << '\n';
    }
    out << "total  " << std::setw(17) << total() << '\n';
    return out.str();
}

LayerReport layer_report(const std::vector<Sample>& samples) {
    LayerReport report;
    for (const auto& s : samples) {
        if (!s.layer) {
            throw UnlabeledSample("sample " + s.id + " (" + s.source_path + ") has no layer");
        }
        const auto l = static_cast<std::size_t>(*s.layer - 1);
        ++report.layer_counts[l];
        if (s.complexity) {
            ++report.tier_counts[l][tier_index(*s.complexity)];
        } else {
            ++report.unknown_tier;
        }
    }
    return report;
}

}  // namespace forge
