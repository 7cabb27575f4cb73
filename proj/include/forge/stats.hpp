#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "forge/layering.hpp"
#include "forge/sample.hpp"

namespace forge {

/// File names inside a pipeline run directory.
namespace run_files {
inline constexpr const char* kSamples = "samples.jsonl";
inline constexpr const char* kIngestReport = "ingest_report.json";
inline constexpr const char* kKept = "kept.jsonl";
inline constexpr const char* kFilterReport = "filter_report.json";
inline constexpr const char* kUnique = "unique.jsonl";
inline constexpr const char* kDedupDecisions = "dedup.json";
inline constexpr const char* kCompiled = "compiled.jsonl";
inline constexpr const char* kCompileReport = "compile_report.json";
inline constexpr const char* kLabeled = "labeled.jsonl";
inline constexpr const char* kQuarantine = "quarantine.jsonl";
inline constexpr const char* kLabelReport = "label_report.json";
inline constexpr const char* kLayered = "layered.jsonl";
inline constexpr const char* kLayerReport = "layers.json";
inline constexpr const char* kManifest = "manifest.jsonl";
inline constexpr const char* kManifestReport = "manifest_report.json";
inline constexpr const char* kPipelineReport = "report.json";
}  // namespace run_files

struct StageCount {
    std::string stage;
    std::size_t in = 0;
    std::size_t out = 0;
    std::size_t dropped = 0;
};

/// {"in", "out", "dropped"}; every stage report embeds one under "counts".
nlohmann::ordered_json stage_counts_json(std::size_t in, std::size_t out, std::size_t dropped);

struct StageArtifacts {
    std::vector<StageCount> stages;  // pipeline order
    std::vector<Sample> layered;     // final labeled + layered samples
    std::optional<LayerReport> layer_report;
    std::vector<std::size_t> dedup_group_sizes;  // members per merged group, kept sample included
};

struct PipelineReport {
    std::vector<StageCount> stage_counts;
    std::map<std::size_t, std::size_t> dedup_group_sizes;  // group size -> number of groups
    std::array<std::size_t, kMaxRank + 1> rank_histogram{};
    LayerReport layers;

    nlohmann::ordered_json to_json() const;
    std::string render() const;
};

/// Published layer sizes of the original dataset, shown for orientation only.
inline constexpr std::array<std::size_t, kLayerCount> kReferenceLayerCounts = {235,  150'279, 105'973,
                                                                               5'015, 275,    430'461};

/// Throws IntegrityError when a stage does not conserve samples (in != out +
/// dropped), when consecutive stages disagree, or when the recorded layer
/// report differs from the layered samples.
PipelineReport summarize(const StageArtifacts& artifacts);

/// Collects stage reports and samples from a run directory. Stages whose
/// report is absent are skipped; a stage whose output file has a different
/// number of records than its report claims is an IntegrityError.
StageArtifacts load_run_artifacts(const std::filesystem::path& run_dir);

}  // namespace forge
