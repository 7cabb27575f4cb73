#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/sample.hpp"

namespace forge {

/// Loss weight of layers 1..6, top of the pyramid first.
inline constexpr std::array<double, kLayerCount> kLayerWeights = {1.0, 0.8, 0.6, 0.4, 0.2, 0.1};

struct LayerAssignment {
    int layer = 6;
    double loss_weight = 0.1;
};

/// Throws ConfigError outside [1, 6].
double layer_weight(int layer);

/// DependencyIssue -> 6 whatever the rank; otherwise 20 -> 1, 15-19 -> 2,
/// 10-14 -> 3, 5-9 -> 4, 1-4 -> 5, 0 -> 6.
LayerAssignment assign_layer(int rank, CompileStatus status);
/// Throws UnlabeledSample when rank or compile status is missing.
LayerAssignment assign_layer(const Sample& sample);

/// Sets `layer` on every sample.
void apply_layers(std::vector<Sample>& samples);

struct LayerReport {
    std::array<std::size_t, kLayerCount> layer_counts{};
    std::array<std::array<std::size_t, 4>, kLayerCount> tier_counts{};  // [layer-1][tier]
    std::size_t unknown_tier = 0;  // layered samples without a complexity label

    std::size_t total() const;
    nlohmann::ordered_json to_json() const;
    /// Text pyramid, one row per layer.
    std::string render() const;
};

/// Every sample must carry a layer (UnlabeledSample otherwise).
LayerReport layer_report(const std::vector<Sample>& samples);

}  // namespace forge
