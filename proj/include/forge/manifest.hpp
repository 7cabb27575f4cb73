#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/sample.hpp"

namespace forge {

inline constexpr int kPhaseCount = kLayerCount * 4;

/// phase = 4 * (layer - 1) + tier index; Basic of layer 1 trains first.
int phase_of(int layer, Complexity tier);

struct ManifestEntry {
    std::string sample_id;
    int phase = 0;
    std::size_t order = 0;  // global position, 0-based
    double loss_weight = 1.0;
    int epochs = 1;
    std::string description;
    std::string code;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Curriculum order: phases ascending, a seeded shuffle inside each phase.
/// Every sample needs a layer and a complexity tier (UnlabeledSample
/// otherwise). The result does not depend on the input order.
std::vector<ManifestEntry> build_manifest(const std::vector<Sample>& samples, int epochs_per_phase,
                                          std::uint64_t shuffle_seed);

nlohmann::ordered_json to_json(const ManifestEntry& entry);
ManifestEntry manifest_entry_from_json(const nlohmann::json& j);

/// One compact JSON object per line, in manifest order.
std::string render_manifest(const std::vector<ManifestEntry>& entries);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// Mismatched copy of the dataset for quality ablations: code, description
/// and rank are each moved between rows by an independent seeded
/// derangement, so no row keeps its own code, description or rank. Rows with
/// rank and compile status are re-layered from the moved rank. Throws
/// ConfigError for fewer than two samples.
std::vector<Sample> corrupt_dataset(const std::vector<Sample>& samples, std::uint64_t seed);

}  // namespace forge
